import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quatpr.algorithms import drop_real, phase_factor_estimate, purify, sign_align
from quatpr.linalg import vrep
from quatpr.measurement import Ensemble, SignalSpec, observe, sample_signal
from quatpr.quaternion import DomainError, qabs, qmul, random_unit


def pure_signal(rng, d=8):
    x = rng.standard_normal((d, 4))
    x[:, 0] = 0
    return x / np.linalg.norm(x)


def test_pure_input_gives_unit_phase(rng):
    z = pure_signal(rng)
    q = phase_factor_estimate(z)
    assert abs(abs(q[0]) - 1.0) <= 1e-12
    assert np.linalg.norm(qmul(z, q)[:, 0]) <= 1e-12


def test_zero_is_a_domain_error():
    with pytest.raises(DomainError):
        phase_factor_estimate(np.zeros((3, 4)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_phase_estimate_properties(seed):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((6, 4))
    q = phase_factor_estimate(z)
    assert qabs(q) == pytest.approx(1.0, abs=1e-12)
    re_norm = np.linalg.norm(qmul(z, q)[:, 0])
    M = z.T @ z
    assert re_norm**2 == pytest.approx(np.linalg.eigvalsh(M)[0], abs=1e-9 * np.trace(M))
    qs = random_unit(rng, 1000)
    others = np.linalg.norm(qmul(z[None], qs[:, None, :])[..., 0], axis=1)
    assert np.all(re_norm <= others + 1e-12)
    assert re_norm <= np.linalg.norm(z[:, 0]) + 1e-12


@pytest.mark.parametrize("trial", range(20))
def test_identifiability_rank_three(trial):
    rng = np.random.default_rng(trial)
    x = pure_signal(rng, 10)
    assert np.linalg.matrix_rank(vrep(x)) == 3
    z = qmul(x, random_unit(rng))
    p = purify(z)
    assert min(np.abs(p - x).max(), np.abs(p + x).max()) <= 1e-9


def test_purify_examples(rng):
    x = pure_signal(rng)
    p = purify(x)
    assert min(np.abs(p - x).max(), np.abs(p + x).max()) <= 1e-14
    z = rng.standard_normal((7, 4))
    assert np.all(vrep(purify(z))[:, 0] == 0.0)
    assert np.linalg.norm(purify(z)) <= np.linalg.norm(z) + 1e-12


def test_degenerate_pair_real_vs_quaternion_ensemble(rng):
    d = 6
    a, b = rng.standard_normal((2, d))
    x1 = np.zeros((d, 4))
    x2 = np.zeros((d, 4))
    x1[:, 1], x1[:, 2] = a, b
    x2[:, 1], x2[:, 2] = b, a
    real = np.zeros((30, d, 4))
    real[..., 0] = rng.standard_normal((30, d))
    E_real = Ensemble(real)
    np.testing.assert_allclose(observe(E_real, x1).y, observe(E_real, x2).y, atol=1e-12)
    E = Ensemble(0.5 * rng.standard_normal((30, d, 4)))
    assert np.abs(observe(E, x1).y - observe(E, x2).y).max() > 1e-3


def test_drop_real(rng):
    z = rng.standard_normal((4, 4))
    out = drop_real(z)
    assert np.all(out[:, 0] == 0) and np.array_equal(out[:, 1:], z[:, 1:])


def test_sign_align_examples(rng):
    z = np.abs(pure_signal(rng))
    np.testing.assert_array_equal(sign_align(-z), z)
    np.testing.assert_array_equal(sign_align(z), z)
    w = pure_signal(rng)
    np.testing.assert_array_equal(sign_align(w), sign_align(-w))
    np.testing.assert_array_equal(sign_align(-z, nonneg_prior=False), -z)


def test_sign_align_exact_tie():
    z = np.zeros((2, 4))
    z[0, 1], z[1, 1] = 1.0, -1.0
    np.testing.assert_array_equal(sign_align(z), sign_align(-z))


def test_sign_align_color_signal():
    x = sample_signal(SignalSpec(16, "pure-nonnegative", 0))
    np.testing.assert_array_equal(sign_align(-x), x)
