"""Spectral initializers (plain, truncated, orthogonality-promoting)."""

from __future__ import annotations

import math
import warnings

import numpy as np

from ..linalg import ones_start, power_iteration
from ._model import PackedModel, model_of


class EmptySelectionWarning(RuntimeWarning):
    pass


def _top(model: PackedModel, S: np.ndarray, power_iters: int) -> np.ndarray:
    S = 0.5 * (S + S.T)
    _, v = power_iteration(S, power_iters, ones_start(model.d, model.p))
    return v


def _spectral(model: PackedModel, power_iters: int) -> np.ndarray:
    if not np.any(model.y):
        return np.zeros(model.d * model.p)
    lam0 = math.sqrt(model.y.mean())
    S = model.weighted_gram(model.y / model.n)
    return lam0 * _top(model, S, power_iters)


def _truncated_spectral(model: PackedModel, theta_y: float, power_iters: int) -> np.ndarray:
    lam0_sq = model.y.mean()
    keep = np.abs(model.y) <= theta_y**2 * lam0_sq
    if not np.any(keep & (model.y > 0)):
        warnings.warn("truncated initialization selected no informative rows", EmptySelectionWarning, stacklevel=3)
        return np.zeros(model.d * model.p)
    S = model.weighted_gram(np.where(keep, model.y, 0.0) / model.n)
    return math.sqrt(lam0_sq) * _top(model, S, power_iters)


def orthogonality_promoting_rows(model: PackedModel, rho: float) -> np.ndarray:
    """Indices of the ``ceil(rho n)`` largest ``y'_k / ||alpha_k||`` (ties: lower index)."""
    if not 0.0 < rho <= 1.0:
        raise ValueError("rho must lie in (0, 1]")
    # guard against rho*n landing a hair above an integer (e.g. 300/6)
    count = min(model.n, max(1, math.ceil(rho * model.n - 1e-9)))
    score = model.y_amp / np.sqrt(model.row_norms_sq)
    order = np.argsort(-score, kind="stable")
    return np.sort(order[:count])


def _amplitude_spectral(model: PackedModel, rho: float, power_iters: int) -> np.ndarray:
    rows = orthogonality_promoting_rows(model, rho)
    w = np.zeros(model.n)
    w[rows] = 1.0 / (model.row_norms_sq[rows] * rows.size)
    lam0 = math.sqrt(np.mean(model.y_amp**2))
    if lam0 == 0.0:
        return np.zeros(model.d * model.p)
    return lam0 * _top(model, model.weighted_gram(w), power_iters)


def spectral_init(E, obs, power_iters: int = 100) -> np.ndarray:
    """``lambda_0 * nu`` with ``nu`` the top eigenvector of ``(1/n) sum y_k alpha_k alpha_k^*``
    and ``lambda_0 = sqrt(mean y)``."""
    m = model_of(E, obs)
    return m.unpack(_spectral(m, power_iters))


def qtwf_init(E, obs, theta_y: float = 3.0, power_iters: int = 100) -> np.ndarray:
    """Spectral init restricted to rows with ``y_k <= theta_y^2 lambda_0^2``."""
    m = model_of(E, obs)
    return m.unpack(_truncated_spectral(m, theta_y, power_iters))


def qtaf_init(E, obs, rho: float = 1 / 6, power_iters: int = 100) -> np.ndarray:
    """Orthogonality-promoting init from the rows most aligned with the signal.

    Averages ``alpha_k alpha_k^* / ||alpha_k||^2`` over the ``ceil(rho n)`` rows with
    the largest normalized amplitude and scales the top eigenvector by
    ``sqrt(mean y'^2)``.
    """
    m = model_of(E, obs)
    return m.unpack(_amplitude_spectral(m, rho, power_iters))
