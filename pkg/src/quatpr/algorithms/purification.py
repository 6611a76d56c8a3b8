"""Pure-quaternion projection via the phase-factor estimate, and sign fixing."""

from __future__ import annotations

import numpy as np

from ..linalg import _check_vec, sym4_min_eigvec
from ..quaternion import DomainError, imag_part, qmul


def phase_factor_estimate(z) -> np.ndarray:
    """Unit ``q`` minimising ``||Re(z q)||``.

    ``Re(z q) = V(z) w`` with ``w = (q0, -q1, -q2, -q3)``, so ``w`` is the
    eigenvector of the smallest eigenvalue of ``V(z)^T V(z)``.
    """
    z = _check_vec(z)
    if not np.any(z):
        raise DomainError("phase factor is undefined for z = 0")
    w = sym4_min_eigvec(z.T @ z)
    return w * np.array([1.0, -1.0, -1.0, -1.0])


def purify(z) -> np.ndarray:
    """``Im(z q)`` with ``q`` from :func:`phase_factor_estimate`; exactly pure."""
    z = _check_vec(z)
    return imag_part(qmul(z, phase_factor_estimate(z)))


def drop_real(z) -> np.ndarray:
    """Naive projection: zero the real part without any phase estimate."""
    return imag_part(_check_vec(z))


def sign_align(z, nonneg_prior: bool = True) -> np.ndarray:
    """Resolve the global sign of a pure vector whose channels should be nonnegative.

    Returns whichever of ``z`` and ``-z`` has the larger sum of imaginary
    components; ties keep ``z``, except that an exact tie is broken by the
    first nonzero component so that ``z`` and ``-z`` map to the same output.
    """
    z = _check_vec(z)
    if not nonneg_prior:
        return z.copy()
    total = z[:, 1:].sum()
    if total == 0.0:
        flat = z[:, 1:].ravel()
        nz = np.flatnonzero(flat)
        if nz.size == 0 or flat[nz[0]] > 0:
            return z.copy()
        return -z
    return z.copy() if total > 0 else -z
