"""Command-line entry point: ``quatpr {sweep,trace,image,moments,selftest}``.

Exit codes: 0 success, 1 a check failed, 2 configuration error, 3 divergence.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .algorithms import DivergenceError, SolverConfig
from .harness import (
    PURE_ALGOS,
    QUATERNION_ALGOS,
    ImageJob,
    SweepSpec,
    _default_cfg,
    convergence_trace,
    image_experiment,
    parse_ratios,
    read_ppm,
    success_sweep,
    write_ppm,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2, 3

ALGO_CHOICES = (*QUATERNION_ALGOS, "wf", "twf", "taf")
FULL_GRID = dict(d=100, trials=100, ratios="3:0.5:13")


class ConfigError(ValueError):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _solver_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--eta1", type=float, help="WF step numerator (step = eta1 / ||z0||^2)")
    p.add_argument("--tp", type=int, help="purification period of the pure-quaternion wrappers")
    p.add_argument("--iters", type=int, help="iterations (outer rounds for pure wrappers)")
    p.add_argument("--stop-tol", type=float, help="stop once the recorded error drops below this")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV output path (default: stdout)")


def _config(args, algo: str) -> SolverConfig:
    cfg = _default_cfg(algo)
    changes = {}
    if args.eta1 is not None:
        changes["eta1"] = args.eta1
    if args.tp is not None:
        changes["Tp"] = args.tp
    if args.iters is not None:
        changes["iters"] = args.iters
    if args.stop_tol is not None:
        changes["stop_tol"] = args.stop_tol
    try:
        return replace(cfg, **changes)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _cmd_sweep(args) -> int:
    d, trials, ratios = args.d, args.trials, args.ratios
    if args.full:
        d, trials, ratios = FULL_GRID["d"], FULL_GRID["trials"], FULL_GRID["ratios"]
    try:
        spec = SweepSpec(
            d=d,
            ratios=tuple(parse_ratios(ratios)),
            trials=trials,
            algo=args.algo,
            cfg=_config(args, args.algo),
            base_seed=args.seed,
            model=args.model,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    _emit(success_sweep(spec, threads=args.threads, timing=not args.no_timing), args.out)
    return EXIT_OK


def _cmd_trace(args) -> int:
    if args.algo not in QUATERNION_ALGOS:
        raise ConfigError(f"trace needs a quaternion algorithm, got {args.algo!r}")
    try:
        ratio = float(args.ratio)
    except ValueError as exc:
        raise ConfigError(f"bad ratio {args.ratio!r}") from exc
    if ratio <= 0 or args.d < 1:
        raise ConfigError("d and ratio must be positive")
    text = convergence_trace(args.d, ratio, args.algo, _config(args, args.algo), args.seed)
    if args.no_timing:
        text = "\n".join(row.rsplit(",", 1)[0] + "," if i else row for i, row in enumerate(text.splitlines())) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _cmd_image(args) -> int:
    if args.algo != "exact" and args.algo not in PURE_ALGOS + QUATERNION_ALGOS:
        raise ConfigError(f"unknown algorithm {args.algo!r}")
    try:
        image = read_ppm(args.input)
        job = ImageJob(
            image=image,
            oversampling=args.oversampling,
            algo=args.algo,
            base_seed=args.seed,
            cfg=None if args.algo == "exact" else _config(args, args.algo),
        )
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    result = image_experiment(job, threads=args.threads)
    if args.output:
        write_ppm(args.output, result.image)
    _emit(result.blocks_csv(), args.out)
    ok = sum(b.success for b in result.blocks)
    low = sum(b.low_sigma3 for b in result.blocks)
    print(f"psnr={result.psnr:.4f} blocks={len(result.blocks)} exact={ok} low_sigma3={low}", file=sys.stderr)
    return EXIT_OK


def _cmd_moments(args) -> int:
    from .measurement import gaussian_moments

    if args.samples < 2:
        raise ConfigError("need at least two samples")
    checks = gaussian_moments(d=args.d, samples=args.samples, seed=args.seed)
    lines = ["check,z_max,passed"]
    for c in checks:
        lines.append(f"{c.name},{c.z_max:.4f},{int(c.passed())}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if all(c.passed() for c in checks) else EXIT_FAIL


def _cmd_selftest(args) -> int:
    from . import selftest

    results = selftest.run(args.seed)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quatpr", description="Quaternion phase retrieval experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="success rate versus oversampling ratio")
    p.add_argument("--algo", choices=ALGO_CHOICES, default="qwf")
    p.add_argument("--model", choices=("quaternion", "mono", "concat"), default="quaternion")
    p.add_argument("--d", type=int, default=50)
    p.add_argument("--ratios", default="3:0.5:13", help="start:step:stop or a comma list")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--threads", type=int, default=None, help="worker processes (default: CPU count)")
    p.add_argument("--full", action="store_true", help="d=100, 100 trials, ratios 3:0.5:13")
    p.add_argument("--no-timing", action="store_true", help="leave timing columns empty (byte-stable output)")
    _solver_args(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("trace", help="error per iteration of one run")
    p.add_argument("--algo", choices=ALGO_CHOICES, default="qwf")
    p.add_argument("--d", type=int, default=50)
    p.add_argument("--ratios", dest="ratio", default="10", help="a single n/d ratio")
    p.add_argument("--no-timing", action="store_true", help="leave elapsed_ns empty (byte-stable output)")
    _solver_args(p)
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("image", help="block-wise color image recovery from a P6 PPM")
    p.add_argument("input", help="input PPM (P6, 8-bit)")
    p.add_argument("--output", help="reconstructed PPM path")
    p.add_argument("--algo", choices=(*ALGO_CHOICES, "exact"), default="pqtaf")
    p.add_argument("--oversampling", type=float, default=7.5, help="measurements per pixel")
    p.add_argument("--threads", type=int, default=None)
    _solver_args(p)
    p.set_defaults(func=_cmd_image)

    p = sub.add_parser("moments", help="Monte-Carlo check of Gaussian row moments")
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_moments)

    p = sub.add_parser("selftest", help="fast oracle and property checks")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
