"""Real-valued WF/TWF/TAF and the two real multichannel models for color signals.

The real solvers reuse the quaternion code paths with one real component per
unknown, so they are the exact real specializations of the quaternion updates.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

from .algorithms import solvers
from .algorithms.metrics import dist_p
from .algorithms.solvers import RunTrace, SolverConfig
from .measurement import ENSEMBLE_STREAM, rng_stream

REAL_ALGOS = ("wf", "twf", "taf")

# real WF keeps the warm-up schedule of its original formulation
REAL_WF_DEFAULTS = SolverConfig(warmup_tau=330.0)


def real_default_cfg(algo: str) -> SolverConfig:
    return REAL_WF_DEFAULTS if algo.lower() == "wf" else SolverConfig()


@dataclass(frozen=True, eq=False)
class RealProblem:
    """Real phaseless problem ``y_k = (a_k^T x)^2``; rows of ``A_real`` are ``a_k^T``."""

    A_real: np.ndarray
    y: np.ndarray
    y_amp: np.ndarray

    components = 1

    def __post_init__(self):
        A = np.asarray(self.A_real, dtype=np.float64)
        if A.ndim != 2 or 0 in A.shape:
            raise ValueError(f"A_real must be a nonempty matrix, got shape {A.shape}")
        y = np.asarray(self.y, dtype=np.float64)
        if y.shape != (A.shape[0],):
            raise ValueError("one intensity per row of A_real required")
        if np.any(y < 0):
            raise ValueError("intensities must be nonnegative")
        object.__setattr__(self, "A_real", A)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "y_amp", np.asarray(self.y_amp, dtype=np.float64))

    @property
    def n(self) -> int:
        return self.A_real.shape[0]

    @property
    def d(self) -> int:
        return self.A_real.shape[1]

    @property
    def packed(self) -> np.ndarray:
        return self.A_real

    @cached_property
    def row_norms_sq(self) -> np.ndarray:
        return np.einsum("kj,kj->k", self.A_real, self.A_real)

    @classmethod
    def from_signal(cls, A_real, x) -> "RealProblem":
        A_real = np.asarray(A_real, dtype=np.float64)
        y = (A_real @ np.asarray(x, dtype=np.float64)) ** 2
        return cls(A_real, y, np.sqrt(y))


def sample_real_problem(n: int, d: int, x, seed=0) -> RealProblem:
    """Standard-normal ``n x d`` matrix and the intensities of ``x``."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (d,):
        raise ValueError(f"signal must have shape ({d},), got {x.shape}")
    rng = rng_stream(seed, ENSEMBLE_STREAM) if not isinstance(seed, np.random.Generator) else seed
    return RealProblem.from_signal(rng.standard_normal((n, d)), x)


_REAL_RUNNERS = {"wf": solvers.qwf_run, "twf": solvers.qtwf_run, "taf": solvers.qtaf_run}


def real_solver_run(problem: RealProblem, algo: str, cfg: SolverConfig | None = None, x=None) -> RunTrace:
    """Real WF, TWF or TAF; errors are ``min(||z - x||, ||z + x||)`` when ``x`` is given.

    Without ``cfg``, WF uses :data:`REAL_WF_DEFAULTS` (step warm-up).
    """
    try:
        run = _REAL_RUNNERS[algo.lower()]
    except KeyError:
        raise ValueError(f"unknown real algorithm {algo!r}; choose from {REAL_ALGOS}") from None
    return run(problem, problem, cfg if cfg is not None else real_default_cfg(algo), x)


@dataclass(frozen=True)
class ChannelLayout:
    """How a pure quaternion signal of length ``d`` is split into real problems."""

    mode: Literal["monochromatic", "concatenation"]
    d: int

    def __post_init__(self):
        if self.mode not in ("monochromatic", "concatenation"):
            raise ValueError(f"unknown channel layout {self.mode!r}")
        if self.d < 1:
            raise ValueError("d must be positive")

    def budgets(self, m: int) -> list[int]:
        """Measurements per real problem; they always sum to ``m``."""
        if self.mode == "concatenation":
            return [m]
        base, extra = divmod(m, 3)
        return [base + (1 if c < extra else 0) for c in range(3)]


@dataclass
class MultichannelResult:
    estimate: np.ndarray
    error: float
    traces: list[RunTrace]
    budgets: list[int]


def multichannel_recover(
    x_pure,
    layout: ChannelLayout,
    algo: str,
    m: int,
    cfg: SolverConfig | None = None,
    seed=0,
) -> MultichannelResult:
    """Recover a pure quaternion signal through real phase retrieval.

    ``monochromatic`` solves one real problem per imaginary channel with the
    budget ``m`` split evenly; the error is the root-sum-square of per-channel
    ``dist_p``.  ``concatenation`` stacks the channels into one real signal of
    length ``3d`` measured ``m`` times; the error is ``dist_p`` on that stack.
    """
    x = np.asarray(x_pure, dtype=np.float64)
    if x.shape != (layout.d, 4):
        raise ValueError(f"expected a pure quaternion vector of shape ({layout.d}, 4)")
    if np.any(x[:, 0] != 0.0):
        raise ValueError("multichannel baselines need a pure quaternion signal")
    budgets = layout.budgets(m)
    if min(budgets) < 1:
        raise ValueError(f"measurement budget {m} too small for layout {layout.mode}")
    estimate = np.zeros_like(x)
    traces = []
    if layout.mode == "monochromatic":
        sq = 0.0
        for c in range(3):
            xc = x[:, c + 1]
            prob = sample_real_problem(budgets[c], layout.d, xc, rng_stream(seed, 10 + c))
            tr = real_solver_run(prob, algo, cfg, xc)
            traces.append(tr)
            estimate[:, c + 1] = tr.final
            sq += dist_p(tr.final, xc) ** 2
        error = float(np.sqrt(sq))
    else:
        x_con = x[:, 1:].T.ravel()
        prob = sample_real_problem(m, 3 * layout.d, x_con, rng_stream(seed, 13))
        tr = real_solver_run(prob, algo, cfg, x_con)
        traces.append(tr)
        estimate[:, 1:] = tr.final.reshape(3, layout.d).T
        error = dist_p(tr.final, x_con)
    return MultichannelResult(estimate=estimate, error=error, traces=traces, budgets=budgets)
