import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quatpr import linalg as L
from quatpr.algorithms.metrics import dist
from quatpr.quaternion import qmul, random_unit


def rand_mat(rng, *shape):
    return rng.standard_normal((*shape, 4))


def displayed_T(A):
    """The 4x4 block layout written out term by term."""
    Re, Pi, Pj, Pk = (A[..., c] for c in range(4))
    return np.block(
        [
            [Re, Pj, Pi, Pk],
            [-Pj, Re, Pk, -Pi],
            [-Pi, -Pk, Re, Pj],
            [-Pk, Pi, -Pj, Re],
        ]
    )


def hermitian(rng, d, psd=False):
    B = rand_mat(rng, d, d)
    if psd:
        return L.matmul(B, L.conj_transpose(B))
    return 0.5 * (B + L.conj_transpose(B))


def test_matvec_examples(rng):
    v = rand_mat(rng, 5)
    np.testing.assert_array_equal(L.matvec(L.identity(5), v), v)
    A = np.array([[[0.0, 1, 0, 0]]])
    np.testing.assert_array_equal(L.matvec(A, np.array([[0.0, 0, 1, 0]])), [[0, 0, 0, 1]])


def test_matvec_shape_mismatch():
    with pytest.raises(ValueError):
        L.matvec(np.zeros((2, 3, 4)), np.zeros((2, 4)))


def test_matvec_through_real_rep(rng):
    A, v = rand_mat(rng, 4, 3), rand_mat(rng, 3)
    Av = L.matvec(A, v)[:, None, :]
    np.testing.assert_allclose(L.real_rep(Av), L.real_rep(A) @ L.real_rep(v[:, None, :]), atol=1e-12)


def test_packed_left_is_matvec(rng):
    A, v = rand_mat(rng, 6, 3), rand_mat(rng, 3)
    np.testing.assert_allclose(L.packed_left(A) @ v.ravel(), L.matvec(A, v).ravel(), atol=1e-13)
    np.testing.assert_allclose(L.packed_left(L.conj_transpose(A)), L.packed_left(A).T)


def test_real_rep_matches_displayed_layout(rng):
    A = rand_mat(rng, 3, 2)
    np.testing.assert_array_equal(L.real_rep(A), displayed_T(A))


def test_real_rep_of_one_and_i():
    np.testing.assert_array_equal(L.real_rep(np.array([[[1.0, 0, 0, 0]]])), np.eye(4))
    Ti = np.array([[0, 0, 1, 0], [0, 0, 0, -1], [-1, 0, 0, 0], [0, 1, 0, 0]], dtype=float)
    np.testing.assert_array_equal(L.real_rep(np.array([[[0.0, 1, 0, 0]]])), Ti)


@pytest.mark.parametrize("trial", range(100))
def test_real_rep_homomorphism(trial):
    rng = np.random.default_rng(trial)
    A, B = rand_mat(rng, 4, 4), rand_mat(rng, 4, 4)
    TA, TB = L.real_rep(A), L.real_rep(B)
    np.testing.assert_array_equal(L.real_rep(A + B), TA + TB)
    assert np.linalg.norm(L.real_rep(L.matmul(A, B)) - TA @ TB) <= 1e-10
    assert np.linalg.norm(L.real_rep(L.conj_transpose(A)) - TA.T) <= 1e-10
    assert abs(np.linalg.norm(TA) - 2 * L.norm(A)) <= 1e-12 * max(1, L.norm(A))
    assert abs(np.linalg.norm(TA, 2) - L.qsvd_singular_values(A)[0]) <= 1e-8


def test_block_column(rng):
    A = rand_mat(rng, 3, 2)
    T1 = L.real_rep_block_column(A, 1)
    expected = np.vstack([A[..., 0], -A[..., 2], -A[..., 1], -A[..., 3]])
    np.testing.assert_array_equal(T1, expected)
    B = rand_mat(rng, 2, 2)
    np.testing.assert_allclose(
        L.real_rep_block_column(L.matmul(A, B), 3), L.real_rep(A) @ L.real_rep_block_column(B, 3), atol=1e-12
    )


def test_vrep_examples(rng):
    np.testing.assert_array_equal(L.vrep(np.array([[1.0, 2, 0, 0]])), [[1, 2, 0, 0]])
    v = rand_mat(rng, 6)
    v[:, 0] = 0
    assert np.all(L.vrep(v)[:, 0] == 0)
    v = rand_mat(rng, 6)
    assert np.linalg.norm(L.vrep(v)) == pytest.approx(L.norm(v), rel=1e-15)
    np.testing.assert_array_equal(L.from_vrep(L.vrep(v)), v)


def test_vrep_rank_link(rng):
    x = rand_mat(rng, 10)
    x[:, 0] = 0
    V = L.vrep(x)
    s = np.linalg.svd(V, compute_uv=False)
    assert L.numerical_rank(V) == np.sum(s > 1e-10 * s[0]) == 3
    x[:, 3] = x[:, 1]
    assert L.numerical_rank(L.vrep(x)) == 2


def test_herm_top_eig_rank_one(rng):
    x = rand_mat(rng, 7)
    x /= L.norm(x)
    lam, v = L.herm_top_eig(L.outer(x, x), iters=100)
    assert lam == pytest.approx(1.0, abs=1e-10)
    assert dist(v, x) <= 1e-8
    assert L.norm(v) == pytest.approx(1.0, abs=1e-12)


def test_herm_top_eig_identity_and_zero():
    lam, v = L.herm_top_eig(L.identity(4))
    assert lam == pytest.approx(1.0)
    lam, v = L.herm_top_eig(np.zeros((3, 3, 4)))
    assert lam == 0.0
    np.testing.assert_allclose(v, L.ones_start(3).reshape(3, 4))


@pytest.mark.parametrize("trial", range(100))
def test_herm_top_eig_vs_real_eigensolver(trial):
    rng = np.random.default_rng(1000 + trial)
    S = hermitian(rng, 5, psd=True)
    lam, _ = L.herm_top_eig(S, iters=2000)
    ev = np.linalg.eigvalsh(L.real_rep(S))
    assert abs(lam - ev[-1]) <= 1e-8 * max(1.0, ev[-1])
    # eigenvalues of T(S) come in quadruples
    np.testing.assert_allclose(np.ptp(ev.reshape(-1, 4), axis=1), 0, atol=1e-9 * ev[-1])


def test_power_iteration_rayleigh_monotone(rng):
    S = L.packed_left(hermitian(rng, 6, psd=True))
    v = L.ones_start(6)
    prev = v @ S @ v
    for _ in range(50):
        v = S @ v
        v /= np.linalg.norm(v)
        cur = v @ S @ v
        assert cur >= prev - 1e-12 * abs(prev)
        prev = cur


def test_power_iteration_restarts_when_start_annihilated():
    # S kills the all-ones start vector; the 1e-8 e_1 nudge escapes
    S = np.diag([1.0, 0, 0, 0])
    start = np.array([0.0, 1, 0, 0])
    lam, v = L.power_iteration(S, 100, start)
    assert lam == pytest.approx(1.0)
    assert abs(v[0]) == pytest.approx(1.0)


def test_top_eigvec_right_phase_equivariance(rng):
    S = hermitian(rng, 5, psd=True)
    lam, v = L.herm_top_eig(S, iters=3000)
    q = random_unit(rng)
    vq = qmul(v, q)
    assert L.norm(L.matvec(S, vq) - lam * vq) <= 1e-8 * lam


def test_hermitian_tolerance(rng):
    S = hermitian(rng, 4)
    noisy = S + 1e-13 * rand_mat(rng, 4, 4)
    assert L.is_hermitian(L.hermitian_part(noisy))
    with pytest.raises(ValueError):
        L.hermitian_part(S + 1e-3 * rand_mat(rng, 4, 4))
    with pytest.raises(ValueError):
        L.hermitian_part(rand_mat(rng, 2, 3))


def test_sym4_diagonal_and_identity():
    np.testing.assert_array_equal(L.sym4_min_eigvec(np.diag([1.0, 2, 3, 4])), [1, 0, 0, 0])
    np.testing.assert_array_equal(L.sym4_min_eigvec(np.eye(4)), [1, 0, 0, 0])
    np.testing.assert_allclose(L.sym4_min_eigvec(np.diag([4.0, 3, 2, 1])), [0, 0, 0, 1])


def test_sym4_rejects_asymmetric():
    M = np.eye(4)
    M[0, 1] = 1
    with pytest.raises(ValueError):
        L.sym4_min_eigvec(M)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_sym4_quartic_root_oracle(seed):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((rng.integers(1, 8), 4))
    M = B.T @ B
    w = L.sym4_min_eigvec(M)
    assert np.linalg.norm(w) == pytest.approx(1.0, abs=1e-12)
    roots = np.roots(np.poly(M))
    lam_min = float(np.min(roots.real))
    scale = max(1.0, np.abs(M).max())
    assert abs(w @ M @ w - lam_min) <= 1e-9 * scale
    nz = np.flatnonzero(np.abs(w) > 1e-14)
    assert w[nz[0]] > 0


def test_sym4_deterministic(rng):
    B = rng.standard_normal((6, 4))
    M = B.T @ B
    np.testing.assert_array_equal(L.sym4_min_eigvec(M), L.sym4_min_eigvec(M.copy()))


def test_qsvd_examples(rng):
    np.testing.assert_allclose(L.qsvd_singular_values(np.array([[[3.0, 4, 0, 0]]])), [5])
    u, v = rand_mat(rng, 4), rand_mat(rng, 3)
    s = L.qsvd_singular_values(L.outer(u, v))
    assert s[0] == pytest.approx(L.norm(u) * L.norm(v), rel=1e-12)
    np.testing.assert_allclose(s[1:], 0, atol=1e-10)


@pytest.mark.parametrize("trial", range(100))
def test_qsvd_quadruples_and_frobenius(trial):
    rng = np.random.default_rng(2000 + trial)
    A = rand_mat(rng, 3, 2)
    with warnings.catch_warnings():
        warnings.simplefilter("error", L.NumericalDegeneracyWarning)
        s = L.qsvd_singular_values(A)
    assert s.shape == (2,)
    assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
    assert abs(np.sum(s**2) - L.norm(A) ** 2) <= 1e-10 * max(1, L.norm(A) ** 2)


def test_dump_csv(tmp_path, rng):
    M = L.real_rep(rand_mat(rng, 2, 2))
    path = tmp_path / "t.csv"
    L.dump_csv(M, path)
    np.testing.assert_array_equal(np.loadtxt(path, delimiter=","), M)
