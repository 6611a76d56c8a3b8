"""Dense quaternion vectors and matrices.

A ``QVector`` is a float array of shape ``(d, 4)`` and a ``QMatrix`` one of
shape ``(d1, d2, 4)``; see :mod:`quatpr.quaternion` for the component order.

Two real embeddings are provided:

* :func:`real_rep` is the block matrix ``T(A) = T_R(T_C(A))`` in the
  classical layout (``Re`` on the diagonal blocks).  It is the reference
  object for norm identities and the QSVD.
* :func:`packed_left` interleaves the four components of every entry, so that
  ``packed_left(A) @ v.ravel() == matvec(A, v).ravel()``.  The solvers work
  on this form because a quaternion matrix-vector product becomes one BLAS
  call.
"""

from __future__ import annotations

import warnings

import numpy as np

from .quaternion import DomainError, left_matrix, qconj, qmul

HERMITIAN_RTOL = 1e-10
JACOBI_TOL = 1e-14
TIE_TOL = 1e-12


class NumericalDegeneracyWarning(RuntimeWarning):
    pass


def _check_vec(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 2 or v.shape[1] != 4 or v.shape[0] == 0:
        raise ValueError(f"expected a quaternion vector of shape (d, 4), got {v.shape}")
    return v


def _check_mat(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 3 or A.shape[2] != 4 or 0 in A.shape:
        raise ValueError(f"expected a quaternion matrix of shape (d1, d2, 4), got {A.shape}")
    return A


def identity(d: int) -> np.ndarray:
    out = np.zeros((d, d, 4))
    out[np.arange(d), np.arange(d), 0] = 1.0
    return out


def conj_transpose(A) -> np.ndarray:
    """``A^*``: transpose and conjugate every entry."""
    A = _check_mat(A)
    return qconj(A.transpose(1, 0, 2))


def norm(v) -> float:
    """Euclidean norm of a quaternion vector (or Frobenius norm of a matrix)."""
    return float(np.sqrt(np.sum(np.asarray(v, dtype=np.float64) ** 2)))


frobenius_norm = norm


def inner(u, v) -> np.ndarray:
    """Quaternion inner product ``u^* v`` (a single quaternion)."""
    u = _check_vec(u)
    v = _check_vec(v)
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape[0]} vs {v.shape[0]}")
    return qmul(qconj(u), v).sum(axis=0)


def outer(u, v) -> np.ndarray:
    """Rank-one matrix ``u v^*``."""
    u = _check_vec(u)
    v = _check_vec(v)
    return qmul(u[:, None, :], qconj(v)[None, :, :])


def matvec(A, v) -> np.ndarray:
    """``A v`` with entry i equal to sum_j A_ij v_j (quaternion order kept)."""
    A = _check_mat(A)
    v = _check_vec(v)
    if A.shape[1] != v.shape[0]:
        raise ValueError(f"shape mismatch: A is {A.shape[:2]}, v has length {v.shape[0]}")
    return qmul(A, v[None, :, :]).sum(axis=1)


def matmul(A, B) -> np.ndarray:
    A = _check_mat(A)
    B = _check_mat(B)
    if A.shape[1] != B.shape[0]:
        raise ValueError(f"shape mismatch: {A.shape[:2]} @ {B.shape[:2]}")
    return qmul(A[:, :, None, :], B[None, :, :, :]).sum(axis=1)


def right_scale(v, q) -> np.ndarray:
    """``v q`` for a vector or matrix and a single quaternion on the right."""
    return qmul(v, np.asarray(q, dtype=np.float64))


def packed_left(A) -> np.ndarray:
    """Real ``(4 d1, 4 d2)`` matrix of ``v -> A v`` on row-major raveled vectors."""
    A = _check_mat(A)
    d1, d2, _ = A.shape
    return left_matrix(A).transpose(0, 2, 1, 3).reshape(4 * d1, 4 * d2)


def complex_rep(A) -> np.ndarray:
    """Complex adjoint ``T_C(A) = [[B, C], [-conj(C), conj(B)]]`` for ``A = B + C j``."""
    A = _check_mat(A)
    B = A[..., 0] + 1j * A[..., 1]
    C = A[..., 2] + 1j * A[..., 3]
    return np.block([[B, C], [-C.conj(), B.conj()]])


def complex_to_real(M) -> np.ndarray:
    """``T_R(B + C i) = [[B, C], [-C, B]]``."""
    M = np.asarray(M)
    B, C = M.real, M.imag
    return np.block([[B, C], [-C, B]])


def real_rep(A) -> np.ndarray:
    """``T(A)``, a ``(4 d1, 4 d2)`` real matrix; ``T(AB) = T(A) T(B)``, ``T(A^*) = T(A)^T``."""
    return complex_to_real(complex_rep(A))


def real_rep_block_column(A, i: int) -> np.ndarray:
    """The i-th (1-based) column of blocks of :func:`real_rep`."""
    A = _check_mat(A)
    if i not in (1, 2, 3, 4):
        raise ValueError("block column index must be 1..4")
    d2 = A.shape[1]
    return real_rep(A)[:, (i - 1) * d2 : i * d2]


def vrep(v) -> np.ndarray:
    """``V(v) = [Re v, P_i v, P_j v, P_k v]``, a ``(d, 4)`` real matrix."""
    return np.array(_check_vec(v), copy=True)


def from_vrep(V) -> np.ndarray:
    return _check_vec(V).copy()


def is_hermitian(A, rtol: float = 0.0) -> bool:
    A = _check_mat(A)
    if A.shape[0] != A.shape[1]:
        return False
    gap = norm(A - conj_transpose(A))
    return gap <= rtol * norm(A)


def hermitian_part(A, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Return ``(A + A^*)/2`` if ``A`` is Hermitian up to ``rtol``, else raise."""
    A = _check_mat(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"Hermitian matrix must be square, got {A.shape[:2]}")
    Ah = conj_transpose(A)
    gap = norm(A - Ah)
    if gap > rtol * norm(A):
        raise ValueError(f"matrix is not Hermitian (||A - A*||_F = {gap:.3e})")
    return 0.5 * (A + Ah)


def power_iteration(S: np.ndarray, iters: int, start: np.ndarray):
    """Power iteration on a real symmetric (packed) matrix.

    Returns ``(lam, v)`` with the largest Rayleigh quotient met along the way
    and its unit vector.  If ``S`` annihilates the start vector it is perturbed
    by ``1e-8 e_1`` and the iteration restarted once.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    m = S.shape[0]
    v = start / np.linalg.norm(start)
    best_lam, best_v = float(v @ S @ v), v
    if not np.any(S):
        return 0.0, v
    restarted = False
    t = 0
    while t < iters:
        w = S @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            if restarted:
                break
            # start vector annihilated by S: perturb once and restart
            restarted = True
            v = v.copy()
            v[0] += 1e-8
            v /= np.linalg.norm(v)
            continue
        v = w / nw
        lam = float(v @ S @ v)
        if lam >= best_lam:
            best_lam, best_v = lam, v
        t += 1
    assert best_v.shape == (m,)
    return best_lam, best_v


def ones_start(d: int, p: int = 4) -> np.ndarray:
    """Packed all-ones vector (real parts set to one), normalized."""
    v = np.zeros(d * p)
    v[::p] = 1.0
    return v / np.sqrt(d)


def herm_top_eig(S, iters: int = 100) -> tuple[float, np.ndarray]:
    """Largest standard eigenvalue and a unit eigenvector of a Hermitian matrix.

    Plain power iteration ``v <- S v / ||S v||`` from the normalized all-ones
    vector, no early stop.  For a zero matrix returns ``(0, start)``.
    """
    S = hermitian_part(S)
    d = S.shape[0]
    lam, v = power_iteration(packed_left(S), iters, ones_start(d))
    return lam, v.reshape(d, 4)


def sym4_min_eigvec(M) -> np.ndarray:
    """Unit eigenvector of the smallest eigenvalue of a real symmetric 4x4 matrix.

    Cyclic Jacobi rotations until the off-diagonal Frobenius mass is below
    1e-14 (relative to ||M||_F).  Ties within 1e-12 go to the lowest index and
    the sign makes the first nonzero component positive.
    """
    a = np.array(M, dtype=np.float64)
    if a.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {a.shape}")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    V = np.eye(4)
    scale = max(np.linalg.norm(a), np.finfo(float).tiny)
    for _ in range(100):
        off = np.sqrt(np.sum(np.triu(a, 1) ** 2) * 2)
        if off <= JACOBI_TOL * scale:
            break
        for p in range(3):
            for q in range(p + 1, 4):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                R = np.eye(4)
                R[p, p] = R[q, q] = c
                R[p, q] = s
                R[q, p] = -s
                a = R.T @ a @ R
                V = V @ R
    diag = np.diag(a)
    lo = diag.min()
    idx = int(np.flatnonzero(diag <= lo + TIE_TOL * max(1.0, abs(lo)))[0])
    w = V[:, idx].copy()
    nz = np.flatnonzero(np.abs(w) > 1e-14)
    if nz.size and w[nz[0]] < 0:
        w = -w
    return w / np.linalg.norm(w)


def qsvd_singular_values(A) -> np.ndarray:
    """Singular values of a quaternion matrix, nonincreasing.

    Computed from ``T(A)``, whose singular values come in quadruples; one
    representative per quadruple is returned.  A warning is issued when the
    spectrum does not cluster into quadruples within ``1e-6 * sigma_max``.
    """
    A = _check_mat(A)
    k = min(A.shape[:2])
    s = np.linalg.svd(real_rep(A), compute_uv=False)
    quads = s[: 4 * k].reshape(k, 4)
    spread = quads.max(axis=1) - quads.min(axis=1)
    smax = s[0] if s.size else 0.0
    if smax > 0 and spread.max() > 1e-6 * smax:
        warnings.warn(
            f"singular values of T(A) do not cluster in quadruples (spread {spread.max():.2e})",
            NumericalDegeneracyWarning,
            stacklevel=2,
        )
    return quads.mean(axis=1)


def numerical_rank(M, rtol: float = 1e-10) -> int:
    s = np.linalg.svd(np.asarray(M, dtype=np.float64), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def dump_csv(M, path) -> None:
    """Write a real matrix (RealRep / VRep) as CSV for debugging."""
    np.savetxt(path, np.asarray(M, dtype=np.float64), delimiter=",", fmt="%.17g")


__all__ = [
    "DomainError",
    "NumericalDegeneracyWarning",
    "conj_transpose",
    "complex_rep",
    "complex_to_real",
    "dump_csv",
    "frobenius_norm",
    "from_vrep",
    "herm_top_eig",
    "hermitian_part",
    "identity",
    "inner",
    "is_hermitian",
    "matmul",
    "matvec",
    "norm",
    "numerical_rank",
    "ones_start",
    "outer",
    "packed_left",
    "power_iteration",
    "qsvd_singular_values",
    "real_rep",
    "real_rep_block_column",
    "right_scale",
    "sym4_min_eigvec",
    "vrep",
]
