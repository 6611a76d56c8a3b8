"""Reconstruction error up to the trivial ambiguities."""

from __future__ import annotations

import numpy as np

from ..quaternion import qmul, qsign


def _pair(z, x) -> tuple[np.ndarray, np.ndarray]:
    z = np.asarray(z, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if z.shape != x.shape:
        raise ValueError(f"length mismatch: {z.shape} vs {x.shape}")
    return z, x


def best_phase(z, x) -> np.ndarray:
    """Unit ``w`` minimising ``||z - x w||``, i.e. ``sign(x^* z)`` (sign(0) = 1)."""
    z, x = _pair(z, x)
    if z.ndim == 1:
        ip = float(x @ z)
        return np.array(1.0 if ip >= 0 else -1.0)
    ip = qmul(x * np.array([1.0, -1.0, -1.0, -1.0]), z).sum(axis=0)
    return qsign(ip)


def dist(z, x) -> float:
    """``min over unit w of ||z - x w||``; real 1-D inputs use ``w = +-1``."""
    z, x = _pair(z, x)
    w = best_phase(z, x)
    if z.ndim == 1:
        return float(np.linalg.norm(z - x * w))
    return float(np.linalg.norm(z - qmul(x, w)))


def dist_p(z, x) -> float:
    """``min(||z + x||, ||z - x||)``, the error up to a global sign."""
    z, x = _pair(z, x)
    return float(min(np.linalg.norm(z + x), np.linalg.norm(z - x)))


def relative_error(z, x) -> float:
    z, x = _pair(z, x)
    return float(np.linalg.norm(z - x) / np.linalg.norm(x))
