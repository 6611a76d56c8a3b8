"""Gaussian quaternion measurement ensembles, test signals and phaseless data."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal, Sequence

import numpy as np

from .linalg import _check_mat, _check_vec, norm, packed_left

SignalKind = Literal["general", "pure", "pure-nonnegative"]

# stream ids under one seed
ENSEMBLE_STREAM = 1
SIGNAL_STREAM = 2


def rng_stream(seed, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, *key)``.

    ``seed`` may be an int or a tuple ``(seed, k1, k2, ...)``; keys are appended
    to the spawn key of a :class:`numpy.random.SeedSequence`, so distinct keys
    give statistically independent, reproducible streams.
    """
    if isinstance(seed, np.random.Generator):
        if key:
            raise ValueError("cannot key an existing Generator")
        return seed
    if isinstance(seed, (tuple, list)):
        entropy, *prefix = seed
    else:
        entropy, prefix = seed, []
    ss = np.random.SeedSequence(int(entropy), spawn_key=tuple(int(k) for k in (*prefix, *key)))
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Measurement matrix whose k-th row is ``alpha_k^*``.

    ``A`` has shape ``(n, d, 4)``; ``observe`` evaluates ``|A x|^2`` row-wise.
    """

    A: np.ndarray
    seed: object = None

    # real components per entry of the unknown
    components = 4

    def __post_init__(self):
        object.__setattr__(self, "A", _check_mat(self.A))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A.shape[1]

    @cached_property
    def packed(self) -> np.ndarray:
        """``(4n, 4d)`` real matrix of ``x -> A x`` on raveled vectors."""
        return packed_left(self.A)

    @cached_property
    def row_norms_sq(self) -> np.ndarray:
        """``||alpha_k||^2`` per row."""
        return np.einsum("kjc,kjc->k", self.A, self.A)


@dataclass(frozen=True, eq=False)
class Observations:
    y: np.ndarray
    y_amp: np.ndarray

    @classmethod
    def from_intensities(cls, y) -> "Observations":
        y = np.asarray(y, dtype=np.float64)
        if np.any(y < 0):
            raise ValueError("intensities must be nonnegative")
        return cls(y=y, y_amp=np.sqrt(y))

    def __len__(self) -> int:
        return self.y.shape[0]


@dataclass(frozen=True)
class SignalSpec:
    d: int
    kind: SignalKind = "general"
    seed: object = 0


def sample_ensemble(n: int, d: int, seed=0) -> Ensemble:
    """Draw ``A`` with every component i.i.d. ``N(0, 1/4)`` (so ``E|a_ij|^2 = 1``)."""
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    rng = rng_stream(seed, ENSEMBLE_STREAM) if not isinstance(seed, np.random.Generator) else seed
    A = 0.5 * rng.standard_normal((n, d, 4))
    return Ensemble(A=A, seed=seed)


def sample_signal(spec: SignalSpec) -> np.ndarray:
    """Unit-norm random signal; entries i.i.d. standard normal per component.

    ``pure`` zeroes the real part; ``pure-nonnegative`` also takes absolute
    values of the imaginary draws (a stand-in for RGB pixels).
    """
    seed = spec.seed
    rng = rng_stream(seed, SIGNAL_STREAM) if not isinstance(seed, np.random.Generator) else seed
    if spec.kind == "general":
        x = rng.standard_normal((spec.d, 4))
    elif spec.kind in ("pure", "pure-nonnegative"):
        x = np.zeros((spec.d, 4))
        x[:, 1:] = rng.standard_normal((spec.d, 3))
        if spec.kind == "pure-nonnegative":
            x[:, 1:] = np.abs(x[:, 1:])
    else:
        raise ValueError(f"unknown signal kind {spec.kind!r}")
    return x / norm(x)


def observe(E: Ensemble, x) -> Observations:
    """Intensities ``y_k = |alpha_k^* x|^2`` and amplitudes ``sqrt(y_k)``."""
    x = _check_vec(x)
    if x.shape[0] != E.d:
        raise ValueError(f"signal length {x.shape[0]} does not match ensemble d={E.d}")
    u = E.packed @ x.ravel()
    y = np.einsum("kc,kc->k", u.reshape(E.n, 4), u.reshape(E.n, 4))
    return Observations(y=y, y_amp=np.sqrt(y))


def dump_observations_csv(path, obs: Observations, E: Ensemble | None = None) -> None:
    """One row per measurement: index, [8 reals of the row's first two entries], y, y_amp."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        header = ["index"]
        if E is not None:
            header += [f"a{j}_{c}" for j in range(min(2, E.d)) for c in "wxyz"]
        w.writerow(header + ["y", "y_amp"])
        for k in range(len(obs)):
            row = [k]
            if E is not None:
                row += [repr(float(v)) for v in E.A[k, : min(2, E.d)].ravel()]
            w.writerow(row + [repr(float(obs.y[k])), repr(float(obs.y_amp[k]))])


@dataclass
class MomentCheck:
    name: str
    estimate: np.ndarray
    expected: np.ndarray
    stderr: np.ndarray
    z_max: float = field(init=False)

    def __post_init__(self):
        est = np.atleast_1d(self.estimate)
        se = np.maximum(np.atleast_1d(self.stderr), 1e-300)
        self.z_max = float(np.max(np.abs(est - np.atleast_1d(self.expected)) / se))

    def passed(self, nsigma: float = 3.0) -> bool:
        return self.z_max <= nsigma


def _mean_se(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = samples.shape[0]
    return samples.mean(axis=0), samples.std(axis=0, ddof=1) / np.sqrt(n)


def gaussian_moments(
    d: int = 4, samples: int = 100_000, seed=0, powers: Sequence[int] = (1, 2, 3)
) -> list[MomentCheck]:
    """Monte-Carlo checks of the Gaussian row moments.

    For unit ``u, v``: ``E|a^* u|^{2l} = (l+1)!/2^l``,
    ``E[a a^* u |a^* v|^2] = u + v v^* u / 2`` (componentwise), and equality of
    the first two moments of ``a^* u`` for ``u = e_1`` and a random unit ``u``.
    """
    from math import factorial

    from .linalg import inner
    from .quaternion import qmul

    rng = rng_stream(seed, 7)
    u = sample_signal(SignalSpec(d, "general", rng))
    v = sample_signal(SignalSpec(d, "general", rng))
    E = sample_ensemble(samples, d, rng)
    proj_u = E.packed @ u.ravel()
    au = proj_u.reshape(samples, 4)
    au2 = np.einsum("kc,kc->k", au, au)
    checks = []
    for l in powers:
        mean, se = _mean_se(au2**l)
        checks.append(MomentCheck(f"E|a*u|^{2 * l}", mean, factorial(l + 1) / 2**l, se))

    # a a^* u |a^* v|^2, with a = conj(row)^T
    av = (E.packed @ v.ravel()).reshape(samples, 4)
    av2 = np.einsum("kc,kc->k", av, av)
    # alpha_k (alpha_k^* u) = conj(A_k)^T (A_k u); rows of A are alpha_k^*
    alpha = E.A * np.array([1.0, -1.0, -1.0, -1.0])
    term = qmul(alpha, au[:, None, :]) * av2[:, None, None]
    mean, se = _mean_se(term.reshape(samples, -1))
    expected = u + 0.5 * qmul(v, inner(v, u)[None, :])
    checks.append(MomentCheck("E[a a*u |a*v|^2]", mean, expected.ravel(), se))

    # rotational invariance: moments of a^* e1 vs a^* u
    e1 = np.zeros((d, 4))
    e1[0, 0] = 1.0
    ae1 = (E.packed @ e1.ravel()).reshape(samples, 4)
    for label, f in (("mean", lambda s: s), ("second", lambda s: s**2)):
        # paired difference: both projections share the same rows
        diff, se = _mean_se(f(ae1) - f(au))
        checks.append(MomentCheck(f"rotation {label} a*e1 vs a*u", diff, np.zeros(4), se))
    return checks
