"""Objectives and (trimmed) gradients.

Gradients follow the left HR convention ``grad f = (df/da + df/db i + df/dc j +
df/dd k) / 4`` for a real ``f`` of ``z = a + b i + c j + d k``, so each equals a
quarter of the ordinary gradient over the 4d real coordinates.
"""

from __future__ import annotations

import numpy as np

from ..quaternion import DomainError
from ._model import PackedModel, model_of

# rows whose |alpha^* z| is below this are never divided by
ZERO_MAG = 1e-300


# --- packed kernels ---------------------------------------------------------


def _wf(model: PackedModel, z: np.ndarray) -> np.ndarray:
    U, mag2 = model.project(z)
    return model.adjoint((mag2 - model.y) / model.n, U)


def _twf_mask(model: PackedModel, U, mag2, znorm, lb, ub, h):
    mag = np.sqrt(mag2)
    ratio = mag / znorm
    resid = np.abs(model.y - mag2)
    K = resid.mean()
    e1 = (ratio >= lb) & (ratio <= ub) & (mag2 > 0)
    e2 = resid <= h * K * ratio
    return e1 & e2


def _twf(model: PackedModel, z, lb, ub, h) -> np.ndarray:
    znorm = np.linalg.norm(z)
    if znorm == 0.0:
        raise DomainError("truncated Wirtinger gradient is undefined at z = 0")
    U, mag2 = model.project(z)
    keep = _twf_mask(model, U, mag2, znorm, lb, ub, h)
    coef = np.zeros(model.n)
    coef[keep] = (model.y[keep] / mag2[keep] - 1.0) / (2 * model.n)
    return model.adjoint(coef, U)


def _taf(model: PackedModel, z, gamma) -> np.ndarray:
    if not np.any(z):
        raise DomainError("truncated amplitude gradient is undefined at z = 0")
    U, mag2 = model.project(z)
    mag = np.sqrt(mag2)
    keep = (mag >= model.y_amp / (1.0 + gamma)) & (mag > ZERO_MAG)
    coef = np.zeros(model.n)
    coef[keep] = (1.0 - model.y_amp[keep] / mag[keep]) / (2 * model.n)
    return model.adjoint(coef, U)


def _taf_untrimmed(model: PackedModel, z) -> np.ndarray:
    U, mag2 = model.project(z)
    mag = np.sqrt(mag2)
    keep = mag > ZERO_MAG
    coef = np.zeros(model.n)
    coef[keep] = (1.0 - model.y_amp[keep] / mag[keep]) / (2 * model.n)
    return model.adjoint(coef, U)


# --- public API -------------------------------------------------------------


def wf_loss(E, obs, z) -> float:
    """Intensity least squares ``(1/n) sum (|alpha^* z|^2 - y)^2``."""
    m = model_of(E, obs)
    _, mag2 = m.project(m.pack(z))
    return float(np.mean((mag2 - m.y) ** 2))


def poisson_loglik(E, obs, z) -> float:
    """``(1/n) sum y log|alpha^* z|^2 - |alpha^* z|^2`` (maximised by truncated WF)."""
    m = model_of(E, obs)
    _, mag2 = m.project(m.pack(z))
    return float(np.mean(m.y * np.log(mag2) - mag2))


def amplitude_loss(E, obs, z) -> float:
    """Amplitude least squares ``(1/n) sum (|alpha^* z| - y')^2``."""
    m = model_of(E, obs)
    _, mag2 = m.project(m.pack(z))
    return float(np.mean((np.sqrt(mag2) - m.y_amp) ** 2))


def wf_gradient(E, obs, z) -> np.ndarray:
    """``(1/n) sum (|alpha_k^* z|^2 - y_k) alpha_k alpha_k^* z``."""
    m = model_of(E, obs)
    return m.unpack(_wf(m, m.pack(z)))


def qtwf_gradient(E, obs, z, cfg=None) -> np.ndarray:
    """Trimmed Poisson gradient over rows passing both truncation rules.

    Keeps rows with ``lb <= |alpha^* z|/||z|| <= ub`` and
    ``|y - |alpha^* z|^2| <= theta_h K |alpha^* z|/||z||`` where ``K`` is the
    mean absolute intensity residual at ``z``.  Pass ``lb=0, ub=inf,
    theta_h=inf`` for the untrimmed gradient (zero-magnitude rows still drop).
    """
    from .solvers import SolverConfig

    cfg = cfg or SolverConfig()
    m = model_of(E, obs)
    g = _twf(m, m.pack(z), cfg.theta_z_lb, cfg.theta_z_ub, cfg.theta_h)
    return m.unpack(g)


def qtwf_keep_set(E, obs, z, cfg=None) -> np.ndarray:
    """Boolean mask of the rows used by :func:`qtwf_gradient` at ``z``."""
    from .solvers import SolverConfig

    cfg = cfg or SolverConfig()
    m = model_of(E, obs)
    zp = m.pack(z)
    znorm = np.linalg.norm(zp)
    if znorm == 0.0:
        raise DomainError("truncation sets are undefined at z = 0")
    U, mag2 = m.project(zp)
    return _twf_mask(m, U, mag2, znorm, cfg.theta_z_lb, cfg.theta_z_ub, cfg.theta_h)


def qtaf_gradient(E, obs, z, gamma: float | None = 0.8) -> np.ndarray:
    """Trimmed amplitude gradient over ``{k : |alpha_k^* z| >= y'_k / (1 + gamma)}``.

    ``gamma=None`` keeps every row with nonzero ``|alpha_k^* z|``.
    """
    m = model_of(E, obs)
    zp = m.pack(z)
    if gamma is None:
        if not np.any(zp):
            raise DomainError("amplitude gradient is undefined at z = 0")
        return m.unpack(_taf_untrimmed(m, zp))
    return m.unpack(_taf(m, zp, gamma))
