"""Fast oracle and property checks runnable without the test suite."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import linalg as L
from .algorithms import (
    amplitude_loss,
    dist,
    poisson_loglik,
    qtaf_gradient,
    qtwf_gradient,
    wf_gradient,
    wf_loss,
)
from .algorithms.solvers import SolverConfig
from .measurement import SignalSpec, gaussian_moments, observe, sample_ensemble, sample_signal
from .quaternion import qmul, random_unit


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def finite_difference(f: Callable[[np.ndarray], float], z: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central differences of ``f`` over every real coordinate, scaled by 1/4."""
    g = np.zeros_like(z)
    flat, out = z.ravel(), g.ravel()
    for i in range(flat.size):
        e = np.zeros_like(flat)
        e[i] = h
        out[i] = (f((flat + e).reshape(z.shape)) - f((flat - e).reshape(z.shape))) / (2 * h)
    return g / 4.0


def gradient_errors(d: int = 8, n: int = 40, seed=0) -> dict[str, float]:
    """Relative error of each analytic gradient against finite differences."""
    rng = np.random.default_rng(seed)
    E = sample_ensemble(n, d, rng)
    x = sample_signal(SignalSpec(d, "general", rng))
    obs = observe(E, x)
    z = x + 0.3 * rng.standard_normal((d, 4)) / np.sqrt(4 * d)

    untrimmed = SolverConfig(theta_z_lb=0.0, theta_z_ub=np.inf, theta_h=np.inf)
    pairs = {
        "wf": (wf_gradient(E, obs, z), lambda v: wf_loss(E, obs, v)),
        "qtwf": (qtwf_gradient(E, obs, z, untrimmed), lambda v: poisson_loglik(E, obs, v)),
        "qtaf": (qtaf_gradient(E, obs, z, gamma=None), lambda v: amplitude_loss(E, obs, v)),
    }
    out = {}
    for name, (g, f) in pairs.items():
        fd = finite_difference(f, z)
        out[name] = float(np.linalg.norm(g - fd) / np.linalg.norm(fd))
    return out


def _algebra(rng) -> CheckResult:
    worst = 0.0
    for _ in range(20):
        A, B = rng.standard_normal((2, 4, 4, 4))
        TA, TB = L.real_rep(A), L.real_rep(B)
        worst = max(
            worst,
            np.abs(L.real_rep(L.matmul(A, B)) - TA @ TB).max(),
            np.abs(L.real_rep(L.conj_transpose(A)) - TA.T).max(),
            abs(np.linalg.norm(TA) - 2 * L.norm(A)),
        )
    return CheckResult("real representation homomorphism", bool(worst <= 1e-10), f"max deviation {worst:.2e}")


def _gradients(rng) -> CheckResult:
    errs = gradient_errors(seed=rng)
    worst = max(errs.values())
    return CheckResult("gradients vs finite differences", worst <= 1e-6, ", ".join(f"{k} {v:.1e}" for k, v in errs.items()))


def _ambiguity(rng) -> CheckResult:
    E = sample_ensemble(30, 5, rng)
    x = sample_signal(SignalSpec(5, "general", rng))
    q = random_unit(rng)
    right = np.abs(observe(E, qmul(x, q)).y - observe(E, x).y).max()
    left = np.abs(observe(E, qmul(q, x)).y - observe(E, x).y).max()
    ok = right <= 1e-12 and left > 1e-6 and dist(qmul(x, q), x) <= 1e-12
    return CheckResult("trivial ambiguity", ok, f"right {right:.1e}, left {left:.1e}")


def _moments(rng) -> CheckResult:
    checks = gaussian_moments(d=4, samples=20_000, seed=int(rng.integers(2**31)))
    # 4 sigma here: a fast smoke test, many statistics at once
    worst = max(c.z_max for c in checks)
    return CheckResult("Gaussian moments", worst <= 4.0, f"max z-score {worst:.2f}")


def run(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [check(rng) for check in (_algebra, _gradients, _ambiguity, _moments)]


__all__ = ["CheckResult", "finite_difference", "gradient_errors", "run"]
