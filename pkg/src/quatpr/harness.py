"""Experiment runners: success-rate sweeps, convergence traces, image blocks.

Every function returns CSV text (header row, LF line endings) so the CLI and
the tests share one code path.
"""

from __future__ import annotations

import csv
import io
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .algorithms import RUNNERS, DivergenceError, SolverConfig, sign_align
from .algorithms.metrics import dist, dist_p, relative_error
from .algorithms.solvers import PQWF_DEFAULTS
from .baselines import REAL_ALGOS, ChannelLayout, multichannel_recover, real_default_cfg
from .measurement import SignalSpec, observe, rng_stream, sample_ensemble, sample_signal

QUATERNION_ALGOS = tuple(RUNNERS)
PURE_ALGOS = ("pqwf", "pqtwf", "pqtaf", "alg1", "alg2", "alg3")
MODELS = ("quaternion", "mono", "concat")


def parse_ratios(text: str) -> list[float]:
    """``"3:0.5:13"`` (start:step:stop, inclusive), ``"6"`` or ``"3,6,9"``."""
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3:
            raise ValueError(f"ratio range must be start:step:stop, got {text!r}")
        start, step, stop = parts
        if step <= 0 or stop < start:
            raise ValueError(f"empty ratio range {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 10) for i in range(count)]
    return [float(p) for p in text.split(",") if p.strip()]


def _default_cfg(algo: str) -> SolverConfig:
    if algo in REAL_ALGOS:
        return real_default_cfg(algo)
    return PQWF_DEFAULTS if algo in ("pqwf", "alg2") else SolverConfig()


@dataclass(frozen=True)
class SweepSpec:
    d: int
    ratios: tuple[float, ...]
    trials: int
    algo: str = "qwf"
    cfg: SolverConfig | None = None
    base_seed: int = 0
    model: str = "quaternion"
    signal: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "ratios", tuple(float(r) for r in self.ratios))
        if self.d < 1 or self.trials < 1:
            raise ValueError("d and trials must be positive")
        if not self.ratios or any(r <= 0 for r in self.ratios):
            raise ValueError("ratios must be positive")
        if any(b <= a for a, b in zip(self.ratios, self.ratios[1:])):
            raise ValueError("ratios must be strictly ascending")
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}")
        if self.model == "quaternion" and self.algo not in QUATERNION_ALGOS:
            raise ValueError(f"algorithm {self.algo!r} is not a quaternion solver")
        if self.model != "quaternion" and self.algo not in REAL_ALGOS:
            raise ValueError(f"model {self.model!r} needs one of {REAL_ALGOS}")

    @property
    def config(self) -> SolverConfig:
        return self.cfg if self.cfg is not None else _default_cfg(self.algo)

    @property
    def signal_kind(self) -> str:
        if self.signal is not None:
            return self.signal
        pure = self.model != "quaternion" or self.algo in PURE_ALGOS
        return "pure" if pure else "general"

    def n_for(self, ratio: float) -> int:
        return max(1, int(round(ratio * self.d)))


@dataclass(frozen=True)
class TrialResult:
    success: bool
    error: float
    wall_ms: float
    diverged: bool = False


def run_trial(spec: SweepSpec, ratio_idx: int, t: int) -> TrialResult:
    """Trial ``t`` at ``spec.ratios[ratio_idx]`` on stream ``(base_seed, ratio_idx, t)``."""
    key = (spec.base_seed, ratio_idx, t)
    n = spec.n_for(spec.ratios[ratio_idx])
    cfg = spec.config
    x = sample_signal(SignalSpec(spec.d, spec.signal_kind, key))
    t0 = time.perf_counter()
    try:
        if spec.model == "quaternion":
            E = sample_ensemble(n, spec.d, key)
            trace = RUNNERS[spec.algo](E, observe(E, x), cfg, x=x)
            metric = dist_p if spec.signal_kind != "general" else dist
            err = metric(trace.final, x)
        else:
            layout = ChannelLayout("monochromatic" if spec.model == "mono" else "concatenation", spec.d)
            err = multichannel_recover(x, layout, spec.algo, n, cfg, key).error
    except DivergenceError:
        return TrialResult(False, math.nan, (time.perf_counter() - t0) * 1e3, diverged=True)
    wall = (time.perf_counter() - t0) * 1e3
    return TrialResult(bool(err < cfg.success_tol), float(err), wall)


def _trial_star(args):
    return run_trial(*args)


def _fan_out(fn, jobs: list, threads: int | None) -> list:
    threads = threads or os.cpu_count() or 1
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        # map preserves submission order
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * threads))))


@dataclass
class SweepRow:
    ratio: float
    n: int
    successes: int
    trials: int
    mean_final_error: float
    mean_wall_ms: float
    diverged: int = 0

    @property
    def rate(self) -> float:
        return self.successes / self.trials


SWEEP_HEADER = ["ratio", "n", "successes", "trials", "rate", "mean_final_error", "mean_wall_ms"]


def sweep_rows(spec: SweepSpec, threads: int | None = 1) -> list[SweepRow]:
    jobs = [(spec, i, t) for i in range(len(spec.ratios)) for t in range(spec.trials)]
    results = _fan_out(_trial_star, jobs, threads)
    rows = []
    for i, ratio in enumerate(spec.ratios):
        chunk = results[i * spec.trials : (i + 1) * spec.trials]
        errs = [r.error for r in chunk if not r.diverged]
        rows.append(
            SweepRow(
                ratio=ratio,
                n=spec.n_for(ratio),
                successes=sum(r.success for r in chunk),
                trials=spec.trials,
                mean_final_error=float(np.mean(errs)) if errs else math.nan,
                mean_wall_ms=float(np.mean([r.wall_ms for r in chunk])),
                diverged=sum(r.diverged for r in chunk),
            )
        )
    return rows


def rows_to_csv(rows: list[SweepRow], timing: bool = True) -> str:
    """Sweep table as CSV; ``timing=False`` blanks wall times for byte-stable output."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for r in rows:
        wall = f"{r.mean_wall_ms:.3f}" if timing else ""
        w.writerow([f"{r.ratio:g}", r.n, r.successes, r.trials, f"{r.rate:.4f}", repr(r.mean_final_error), wall])
    return buf.getvalue()


def success_sweep(spec: SweepSpec, threads: int | None = 1, timing: bool = True) -> str:
    """Success rate per oversampling ratio as CSV."""
    return rows_to_csv(sweep_rows(spec, threads), timing=timing)


def onset_ratio(rows: list[SweepRow], level: float = 0.95) -> float:
    """Smallest ratio from which the rate stays at or above ``level`` (inf if never)."""
    onset = math.inf
    for r in reversed(rows):
        if r.rate >= level:
            onset = r.ratio
        else:
            break
    return onset


# --- convergence traces ------------------------------------------------------


def trace_run(d: int, ratio: float, algo: str, cfg: SolverConfig | None = None, seed=0):
    """One benchmark run; returns the :class:`RunTrace`."""
    if algo not in QUATERNION_ALGOS:
        raise ValueError(f"unknown algorithm {algo!r}")
    cfg = cfg if cfg is not None else _default_cfg(algo)
    kind = "pure" if algo in PURE_ALGOS else "general"
    x = sample_signal(SignalSpec(d, kind, seed))
    E = sample_ensemble(max(1, int(round(ratio * d))), d, seed)
    return RUNNERS[algo](E, observe(E, x), cfg, x=x)


def convergence_trace(d: int, ratio: float, algo: str, cfg: SolverConfig | None = None, seed=0) -> str:
    """Rows ``iter,log10_error,elapsed_ns``; pure wrappers report round boundaries."""
    tr = trace_run(d, ratio, algo, cfg, seed)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["iter", "log10_error", "elapsed_ns"])
    with np.errstate(divide="ignore"):
        logs = np.log10(np.asarray(tr.errors, dtype=np.float64))
    for it, le, ns in zip(tr.iters, logs, tr.elapsed_ns):
        w.writerow([it, repr(float(le)), ns])
    return buf.getvalue()


def linear_fit(iters, log_err) -> tuple[float, float]:
    """Least-squares slope and R^2 of ``log_err`` against ``iters``."""
    t = np.asarray(iters, dtype=np.float64)
    e = np.asarray(log_err, dtype=np.float64)
    if t.size < 3:
        raise ValueError("need at least three points for a fit")
    slope, icpt = np.polyfit(t, e, 1)
    resid = e - (slope * t + icpt)
    ss_tot = float(np.sum((e - e.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2


# --- images -----------------------------------------------------------------


def read_ppm(path) -> np.ndarray:
    """Binary PPM (P6, maxval 255) to an ``(H, W, 3)`` uint8 array."""
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    if tokens[0] != b"P6":
        raise ValueError("only binary PPM (P6) is supported")
    w, h, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise ValueError("only 8-bit PPM (maxval 255) is supported")
    pixels = data[pos + 1 : pos + 1 + w * h * 3]
    if len(pixels) != w * h * 3:
        raise ValueError("truncated PPM pixel data")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(h, w, 3).copy()


def write_ppm(path, image: np.ndarray) -> None:
    img = np.asarray(image)
    if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
        raise ValueError("expected an (H, W, 3) uint8 image")
    with open(path, "wb") as fh:
        fh.write(f"P6\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """``10 log10(255^2 / MSE)`` over all channels; ``inf`` when identical."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    mse = float(np.mean((a.astype(np.float64) - b.astype(np.float64)) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)


def block_to_pure(block: np.ndarray) -> tuple[np.ndarray, float]:
    """``(b, b, 3)`` uint8 block to a unit pure quaternion vector and its scale."""
    rgb = np.asarray(block, dtype=np.float64).reshape(-1, 3) / 255.0
    v = np.zeros((rgb.shape[0], 4))
    v[:, 1:] = rgb
    scale = float(np.linalg.norm(v))
    return (v / scale if scale > 0 else v), scale


def pure_to_block(v: np.ndarray, scale: float, b: int) -> np.ndarray:
    rgb = np.clip(np.asarray(v)[:, 1:] * scale * 255.0, 0.0, 255.0)
    return np.rint(rgb).astype(np.uint8).reshape(b, b, 3)


def sigma3(x: np.ndarray) -> float:
    """Third singular value of the ``d x 4`` component matrix of ``x``."""
    s = np.linalg.svd(np.asarray(x, dtype=np.float64), compute_uv=False)
    return float(s[2]) if s.size > 2 else 0.0


@dataclass(frozen=True)
class ImageJob:
    image: np.ndarray
    block: int = 16
    oversampling: float = 7.5
    algo: str = "pqtaf"
    base_seed: int = 0
    cfg: SolverConfig | None = None
    # blind-mode stop: intensity residual below this fraction of ||y||
    stop_rtol: float = 1e-13
    success_tol: float = 1e-9

    def __post_init__(self):
        img = np.asarray(self.image)
        if img.ndim != 3 or img.shape[2] != 3 or img.dtype != np.uint8:
            raise ValueError("image must be an (H, W, 3) uint8 array")
        h, w, _ = img.shape
        if h % self.block or w % self.block:
            raise ValueError(f"image size {w}x{h} is not divisible by the block size {self.block}")
        if self.algo != "exact" and self.algo not in QUATERNION_ALGOS:
            raise ValueError(f"unknown algorithm {self.algo!r}")

    @property
    def n(self) -> int:
        return int(round(self.oversampling * self.block * self.block))


# blocks at or below this third singular value are not expected to be identifiable
SIGMA3_FLOOR = 0.1


@dataclass
class BlockResult:
    block_id: int
    pixels: np.ndarray
    relative_error: float
    sigma3: float
    success: bool

    @property
    def low_sigma3(self) -> bool:
        return self.sigma3 <= SIGMA3_FLOOR


def recover_block(job: ImageJob, block_id: int, block: np.ndarray) -> BlockResult:
    """Measure and solve one block with its own ensemble stream."""
    x, scale = block_to_pure(block)
    s3 = sigma3(x)
    if scale == 0.0:
        return BlockResult(block_id, np.zeros_like(block), 0.0, s3, True)
    if job.algo == "exact":
        est = x.copy()
    else:
        E = sample_ensemble(job.n, x.shape[0], (job.base_seed, block_id))
        obs = observe(E, x)
        cfg = job.cfg if job.cfg is not None else _default_cfg(job.algo)
        cfg = replace(cfg, stop_tol=job.stop_rtol * float(np.linalg.norm(obs.y)))
        est = RUNNERS[job.algo](E, obs, cfg).final
        est = est.copy()
        est[:, 0] = 0.0
    est = sign_align(est, nonneg_prior=True)
    rel = relative_error(est, x)
    return BlockResult(block_id, pure_to_block(est, scale, job.block), rel, s3, bool(rel < job.success_tol))


def _block_star(args):
    return recover_block(*args)


@dataclass
class ImageResult:
    image: np.ndarray
    blocks: list[BlockResult] = field(default_factory=list)
    psnr: float = math.nan

    def blocks_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["block_id", "relative_error", "sigma3", "success_flag"])
        for b in self.blocks:
            w.writerow([b.block_id, repr(b.relative_error), repr(b.sigma3), int(b.success)])
        return buf.getvalue()


def image_experiment(job: ImageJob, threads: int | None = 1) -> ImageResult:
    """Block-wise recovery; blocks are numbered row-major."""
    img = np.asarray(job.image)
    b = job.block
    h, w, _ = img.shape
    jobs = []
    for r in range(h // b):
        for c in range(w // b):
            jobs.append((job, len(jobs), img[r * b : (r + 1) * b, c * b : (c + 1) * b]))
    results = _fan_out(_block_star, jobs, threads)
    out = np.zeros_like(img)
    per_row = w // b
    for res in results:
        r, c = divmod(res.block_id, per_row)
        out[r * b : (r + 1) * b, c * b : (c + 1) * b] = res.pixels
    return ImageResult(image=out, blocks=results, psnr=psnr(img, out))


def random_block(seed, b: int = 16, duplicate_channel: bool = False) -> np.ndarray:
    """Uniform random 8-bit RGB block; optionally with G equal to R."""
    rng = rng_stream(seed, 3)
    block = rng.integers(0, 256, size=(b, b, 3), dtype=np.uint8)
    if duplicate_channel:
        block[..., 1] = block[..., 0]
    return block
