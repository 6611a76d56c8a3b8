"""QWF, QTWF, QTAF and their pure-quaternion wrappers."""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import gradients as G
from ._model import PackedModel, model_of
from .initialization import _amplitude_spectral, _spectral, _truncated_spectral
from .metrics import dist, dist_p
from .purification import drop_real, purify


class DivergenceError(RuntimeError):
    """The iterate blew up (norm above ``divergence_factor * ||z_0||`` or non-finite)."""

    def __init__(self, message: str, iteration: int):
        super().__init__(message)
        self.iteration = iteration


@dataclass(frozen=True)
class SolverConfig:
    """Step sizes, iteration counts and truncation thresholds.

    ``eta1`` is the Wirtinger-flow numerator (step ``eta1 / ||z_0||^2``);
    ``eta_twf`` and ``eta_taf`` are the fixed steps of the truncated variants.
    ``iters`` counts plain iterations, or outer rounds of ``Tp`` inner steps for
    the pure-quaternion wrappers.  ``stop_tol`` (off by default) ends a run
    once the recorded error (true error or intensity residual) drops below it.
    """

    eta1: float = 0.2
    iters: int = 1500
    Tp: int = 5
    theta_z_lb: float = 0.3
    theta_z_ub: float = 4.5
    theta_h: float = 5.0
    theta_y: float = 3.0
    eta_twf: float = 0.8
    gamma: float = 0.8
    rho: float = 1 / 6
    eta_taf: float = 1.2
    power_iters: int = 100
    success_tol: float = 1e-5
    stop_tol: float | None = None
    divergence_factor: float = 1e6
    # WF warm-up: step numerator min(1 - exp(-t / warmup_tau), eta1) at step t
    warmup_tau: float | None = None

    def __post_init__(self):
        if not (self.eta1 > 0 and self.eta_twf > 0 and self.eta_taf > 0):
            raise ValueError("step sizes must be positive")
        if self.iters < 0:
            raise ValueError("iters must be >= 0")
        if self.Tp < 1:
            raise ValueError("Tp must be >= 1")
        if not self.theta_z_lb < self.theta_z_ub:
            raise ValueError("theta_z_lb must be below theta_z_ub")
        if not (0 < self.gamma and 0 < self.rho <= 1):
            raise ValueError("gamma must be positive and rho in (0, 1]")
        if self.power_iters < 1:
            raise ValueError("power_iters must be >= 1")
        if self.warmup_tau is not None and not self.warmup_tau > 0:
            raise ValueError("warmup_tau must be positive")

    def with_(self, **changes) -> "SolverConfig":
        return replace(self, **changes)


# eta1 = 0.15 for PQWF
PQWF_DEFAULTS = SolverConfig(eta1=0.15)


@dataclass
class RunTrace:
    """Error curve of one run.

    ``errors[i]`` is measured after ``iters[i]`` gradient steps; ``metric`` is
    ``"dist"``, ``"dist_p"`` (when the true signal was supplied) or
    ``"residual"`` (``|| |Az|^2 - y ||`` otherwise).
    """

    errors: list[float] = field(default_factory=list)
    iters: list[int] = field(default_factory=list)
    elapsed_ns: list[int] = field(default_factory=list)
    final: np.ndarray | None = None
    iterations_run: int = 0
    wall_time: float = 0.0
    metric: str = "dist"

    @property
    def final_error(self) -> float:
        return self.errors[-1] if self.errors else float("nan")

    def to_csv(self, fh=None) -> str:
        """Rows ``iter,error,elapsed_ns``; writes to ``fh`` if given, returns the text."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iter", "error", "elapsed_ns"])
        for it, err, ns in zip(self.iters, self.errors, self.elapsed_ns):
            w.writerow([it, repr(float(err)), ns])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text


Step = Callable[[np.ndarray], np.ndarray]


def _wf_step(model: PackedModel, eta: float, cfg: SolverConfig | None = None) -> Step:
    tau = None if cfg is None else cfg.warmup_tau
    if tau is None:
        return lambda z: z - eta * G._wf(model, z)
    scale = eta / cfg.eta1
    t = 0

    def step(z):
        nonlocal t
        t += 1
        return z - scale * min(1.0 - math.exp(-t / tau), cfg.eta1) * G._wf(model, z)

    return step


def _twf_step(model: PackedModel, cfg: SolverConfig) -> Step:
    # ascent on the Poisson log-likelihood
    return lambda z: z + cfg.eta_twf * G._twf(model, z, cfg.theta_z_lb, cfg.theta_z_ub, cfg.theta_h)


def _taf_step(model: PackedModel, cfg: SolverConfig) -> Step:
    return lambda z: z - cfg.eta_taf * G._taf(model, z, cfg.gamma)


def _wf_eta(cfg: SolverConfig, z0: np.ndarray) -> float:
    return cfg.eta1 / float(z0 @ z0)


def _residual(model: PackedModel, z: np.ndarray) -> float:
    _, mag2 = model.project(z)
    return float(np.linalg.norm(mag2 - model.y))


def _run(
    model: PackedModel,
    z0: np.ndarray,
    step: Step,
    cfg: SolverConfig,
    x=None,
    *,
    inner: int = 1,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
    metric: str = "dist",
) -> RunTrace:
    """Run ``cfg.iters`` rounds of ``inner`` steps, then ``project`` (if any)."""
    t_start = time.perf_counter_ns()
    x_packed = None if x is None else model.pack(x)
    if x_packed is None:
        metric = "residual"

    def measure(z):
        if x_packed is None:
            return _residual(model, z)
        if metric == "dist_p":
            return dist_p(z, x_packed)
        return dist(model.unpack(z), model.unpack(x_packed))

    trace = RunTrace(metric=metric)

    def record(z, it):
        trace.errors.append(measure(z))
        trace.iters.append(it)
        trace.elapsed_ns.append(time.perf_counter_ns() - t_start)

    z = z0
    record(z, 0)
    limit = cfg.divergence_factor * max(float(np.linalg.norm(z0)), 1e-300)
    done = 0
    # overflow on a diverging run surfaces as DivergenceError below
    with np.errstate(over="ignore", invalid="ignore"):
        if np.any(z0):
            for _ in range(cfg.iters):
                for _ in range(inner):
                    z = step(z)
                    done += 1
                # checked before projecting: the projection cannot handle non-finite input
                nz = float(np.linalg.norm(z))
                if not np.isfinite(nz) or nz > limit:
                    raise DivergenceError(f"iterate norm {nz:.3e} exceeded {limit:.3e} after {done} steps", done)
                if project is not None:
                    z = project(z)
                record(z, done)
                if cfg.stop_tol is not None and trace.errors[-1] < cfg.stop_tol:
                    break
    trace.final = model.unpack(z)
    trace.iterations_run = done
    trace.wall_time = (time.perf_counter_ns() - t_start) * 1e-9
    return trace


def _purify_packed(model: PackedModel) -> Callable[[np.ndarray], np.ndarray]:
    if model.p != 4:
        raise ValueError("pure-quaternion projection needs a quaternion problem")
    return lambda z: purify(z.reshape(-1, 4)).ravel()


def _drop_real_packed(z: np.ndarray) -> np.ndarray:
    return drop_real(z.reshape(-1, 4)).ravel()


# --- plain solvers ------------------------------------------------------------


def qwf_run(E, obs, cfg: SolverConfig | None = None, x=None, z0=None) -> RunTrace:
    """Spectral initialization followed by ``cfg.iters`` Wirtinger-flow steps."""
    cfg = cfg or SolverConfig()
    m = model_of(E, obs)
    z0 = _spectral(m, cfg.power_iters) if z0 is None else m.pack(z0)
    if not np.any(z0):
        return _run(m, z0, lambda z: z, cfg.with_(iters=0), x)
    return _run(m, z0, _wf_step(m, _wf_eta(cfg, z0), cfg), cfg, x)


def qtwf_run(E, obs, cfg: SolverConfig | None = None, x=None, z0=None) -> RunTrace:
    """Truncated spectral init followed by truncated gradient ascent."""
    cfg = cfg or SolverConfig()
    m = model_of(E, obs)
    z0 = _truncated_spectral(m, cfg.theta_y, cfg.power_iters) if z0 is None else m.pack(z0)
    return _run(m, z0, _twf_step(m, cfg), cfg, x)


def qtaf_run(E, obs, cfg: SolverConfig | None = None, x=None, z0=None) -> RunTrace:
    """Orthogonality-promoting init followed by truncated amplitude descent."""
    cfg = cfg or SolverConfig()
    m = model_of(E, obs)
    z0 = _amplitude_spectral(m, cfg.rho, cfg.power_iters) if z0 is None else m.pack(z0)
    return _run(m, z0, _taf_step(m, cfg), cfg, x)


# --- pure-quaternion wrappers ------------------------------------------------

_INNER = {
    "qwf": (lambda m, cfg: _spectral(m, cfg.power_iters), lambda m, cfg, z0: _wf_step(m, _wf_eta(cfg, z0), cfg)),
    "qtwf": (lambda m, cfg: _truncated_spectral(m, cfg.theta_y, cfg.power_iters), lambda m, cfg, z0: _twf_step(m, cfg)),
    "qtaf": (lambda m, cfg: _amplitude_spectral(m, cfg.rho, cfg.power_iters), lambda m, cfg, z0: _taf_step(m, cfg)),
}


def pure_wrap(inner_step, E, obs, cfg: SolverConfig | None = None, x=None, z0=None) -> RunTrace:
    """Alternate ``cfg.Tp`` inner steps with a purification, ``cfg.iters`` times.

    ``inner_step`` is ``"qwf"``, ``"qtwf"``, ``"qtaf"`` or a callable mapping a
    quaternion vector ``(d, 4)`` to the next iterate (then ``z0`` defaults to
    the plain spectral initialization).  The trace holds ``dist_p`` at round
    boundaries when ``x`` is given.
    """
    cfg = cfg or SolverConfig()
    m = model_of(E, obs)
    if isinstance(inner_step, str):
        init, make_step = _INNER[inner_step]
        z0 = init(m, cfg) if z0 is None else m.pack(z0)
        step = make_step(m, cfg, z0) if np.any(z0) else (lambda z: z)
    else:
        z0 = _spectral(m, cfg.power_iters) if z0 is None else m.pack(z0)
        step = lambda z: np.asarray(inner_step(m.unpack(z)), dtype=np.float64).ravel()
    return _run(m, z0, step, cfg, x, inner=cfg.Tp, project=_purify_packed(m), metric="dist_p")


def pqwf_run(E, obs, cfg: SolverConfig | None = None, x=None) -> RunTrace:
    return pure_wrap("qwf", E, obs, cfg or PQWF_DEFAULTS, x)


def pqtwf_run(E, obs, cfg: SolverConfig | None = None, x=None) -> RunTrace:
    return pure_wrap("qtwf", E, obs, cfg, x)


def pqtaf_run(E, obs, cfg: SolverConfig | None = None, x=None) -> RunTrace:
    return pure_wrap("qtaf", E, obs, cfg, x)


# --- comparison variants for the pure prior ------------------------------------


def _finish(trace: RunTrace, post, x) -> RunTrace:
    """Apply a final projection and append its ``dist_p`` to the trace."""
    t0 = time.perf_counter_ns()
    trace.final = post(trace.final)
    if x is not None:
        trace.errors.append(dist_p(trace.final, x))
        trace.metric = "dist_p"
    else:
        trace.errors.append(trace.errors[-1])
    trace.iters.append(trace.iterations_run)
    last = trace.elapsed_ns[-1] if trace.elapsed_ns else 0
    trace.elapsed_ns.append(last + time.perf_counter_ns() - t0)
    return trace


def qwf_then_purify(E, obs, cfg: SolverConfig | None = None, x=None) -> RunTrace:
    """QWF, then a single purification of the output (baseline "Alg. I")."""
    return _finish(qwf_run(E, obs, cfg, x), purify, x)


def pqwf_drop_real(E, obs, cfg: SolverConfig | None = None, x=None) -> RunTrace:
    """PQWF with the projection replaced by zeroing the real part ("Alg. II")."""
    cfg = cfg or PQWF_DEFAULTS
    m = model_of(E, obs)
    z0 = _spectral(m, cfg.power_iters)
    step = _wf_step(m, _wf_eta(cfg, z0), cfg) if np.any(z0) else (lambda z: z)
    return _run(m, z0, step, cfg, x, inner=cfg.Tp, project=_drop_real_packed, metric="dist_p")


def qwf_then_drop_real(E, obs, cfg: SolverConfig | None = None, x=None) -> RunTrace:
    """QWF, then zero the real part of the output ("Alg. III")."""
    return _finish(qwf_run(E, obs, cfg, x), drop_real, x)
