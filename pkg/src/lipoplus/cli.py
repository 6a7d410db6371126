"""Command line entry point: ``run``, ``trace``, ``bench`` and ``bound``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import theory
from .experiments import CampaignSpec, Mode, run_campaign
from .objective import BENCHMARK_NAMES, make_benchmark, set_constants_file, target_level
from .optimizers import (DEFAULT_SAMPLE_CAP, DEFAULT_SLOPE_THRESHOLD, DEFAULT_WINDOW, Kind,
                         maximize)

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _default_seed() -> int:
    env = os.environ.get("LIPO_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"LIPO_SEED must be an integer, got {env!r}") from None


def _add_optimizer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--optimizer", required=True, help="prs, lipo, lipo+, adalipo, adalipo+, adalipo+ns")
    p.add_argument("--benchmark", required=True, choices=BENCHMARK_NAMES)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--seed", type=int, default=None, help="defaults to $LIPO_SEED, then 0")
    p.add_argument("--kappa", type=float, default=None,
                   help="Lipschitz constant for lipo/lipo+ (default: the benchmark's)")
    p.add_argument("--p", type=float, default=None, help="fixed exploration probability (adalipo)")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--slope-threshold", type=float, default=DEFAULT_SLOPE_THRESHOLD)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--theta", type=float, default=None,
                   help="stop once the target level for theta is reached")
    p.add_argument("--sample-cap", type=int, default=DEFAULT_SAMPLE_CAP)
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lipoplus", description=__doc__)
    parser.add_argument("--constants", default=None, help="benchmark constants JSON file")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="one optimisation, JSON summary")
    _add_optimizer_flags(p_run)
    p_trace = sub.add_parser("trace", help="one optimisation, per-evaluation trace CSV")
    _add_optimizer_flags(p_trace)

    p_bench = sub.add_parser("bench", help="multi-seed campaign, statistics CSV")
    p_bench.add_argument("--config", default=None, help="campaign JSON")
    p_bench.add_argument("--benchmark", default=None, help="comma list, overrides the config")
    p_bench.add_argument("--optimizer", default=None, help="comma list, overrides the config")
    p_bench.add_argument("--mode", choices=[m.value for m in Mode], default=None)
    p_bench.add_argument("--reps", type=int, default=None)
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.add_argument("--budget", type=int, default=None, help="same budget for every function")
    p_bench.add_argument("--p", type=float, default=None)
    p_bench.add_argument("--alpha", type=float, default=None)
    p_bench.add_argument("--slope-threshold", type=float, default=None)
    p_bench.add_argument("--window", type=int, default=None)
    p_bench.add_argument("--theta", type=float, default=None)
    p_bench.add_argument("--sample-cap", type=int, default=None)
    p_bench.add_argument("--jobs", type=int, default=1)
    p_bench.add_argument("--out", default=None, help="CSV path; the table then goes to stdout")

    p_bound = sub.add_parser("bound", help="C_d rejection-bound constants as CSV")
    p_bound.add_argument("--dims", type=_int_list, default=[2, 5, 10, 50],
                         help="e.g. 2,5,10,50 or 2-60")
    ratio = p_bound.add_mutually_exclusive_group()
    ratio.add_argument("--ratio", type=float, default=None, help="delta/kappa (default 1)")
    ratio.add_argument("--exp-norm", action="store_true",
                       help="use the exact delta/kappa of exp(||x||) on [-1,1]^d")
    vol = p_bound.add_mutually_exclusive_group()
    vol.add_argument("--cube", action="store_true", help="domain [-1,1]^d (the default)")
    vol.add_argument("--volume", type=float, default=None, help="fixed domain volume")
    p_bound.add_argument("--clamp", action="store_true", help="clip values to [0, 1]")
    p_bound.add_argument("--out", default=None)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _single_run(args):
    kind = Kind.parse(args.optimizer)
    bench = make_benchmark(args.benchmark, args.dim)
    kappa = args.kappa
    if kind.needs_kappa and kappa is None:
        kappa = bench.lipschitz_constant
    target = None if args.theta is None else target_level(bench, args.theta)
    if args.budget is None and target is None and not kind.uses_slope:
        raise UsageError("give --budget or --theta so the run can stop")
    seed = args.seed if args.seed is not None else _default_seed()
    return maximize(bench.objective, kind, seed=seed, budget=args.budget, kappa=kappa, p=args.p,
                    alpha=args.alpha, slope_threshold=args.slope_threshold, window=args.window,
                    target=target, sample_cap=args.sample_cap), bench, kind, seed


def cmd_run(args) -> int:
    result, bench, kind, seed = _single_run(args)
    summary = {"benchmark": bench.name, "optimizer": kind.value, "seed": seed}
    summary.update(result.summary())
    summary["dmax"] = bench.max_value - result.best.value
    _emit(json.dumps(summary, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def cmd_trace(args) -> int:
    result, *_ = _single_run(args)
    result.trace.check()
    _emit(result.trace.to_csv(), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.config is not None:
        spec = CampaignSpec.from_json(args.config)
    else:
        if args.benchmark is None or args.optimizer is None:
            raise UsageError("bench needs --config or both --benchmark and --optimizer")
        spec = CampaignSpec(benchmarks=[], optimizers=[])
    if args.benchmark is not None:
        spec.benchmarks = [b.strip() for b in args.benchmark.split(",")]
    if args.optimizer is not None:
        spec.optimizers = [o.strip() for o in args.optimizer.split(",")]
    if not spec.benchmarks or not spec.optimizers:
        raise UsageError("the campaign lists no benchmark or no optimizer")
    overrides = {"mode": args.mode, "repetitions": args.reps, "p": args.p, "alpha": args.alpha,
                 "slope_threshold": args.slope_threshold, "window": args.window,
                 "theta": args.theta, "sample_cap": args.sample_cap}
    for key, value in overrides.items():
        if value is not None:
            setattr(spec, key, value)
    if args.seed is not None:
        spec.base_seed = args.seed
    elif args.config is None:
        spec.base_seed = _default_seed()
    if args.budget is not None:
        spec.budgets = {name: args.budget for name in spec.benchmarks}
    spec.__post_init__()
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")

    stats = run_campaign(spec, jobs=args.jobs, constants_file=args.constants)
    if args.out is None:
        sys.stdout.write(stats.to_csv())
    else:
        _emit(stats.to_csv(), args.out)
        sys.stdout.write(stats.pretty() + "\n")
    return EXIT_OK


def cmd_bound(args) -> int:
    if any(d < 1 for d in args.dims):
        raise UsageError("dimensions must be positive")
    if args.exp_norm:
        ratio = theory.exp_norm_ratio
    else:
        ratio = 1.0 if args.ratio is None else args.ratio
        if ratio < 0:
            raise UsageError("--ratio must be non-negative")
    if args.volume is not None:
        if args.volume <= 0:
            raise UsageError("--volume must be positive")
        volume = lambda d: args.volume
    else:
        volume = lambda d: 2.0 ** d
    rows = theory.cd_table(args.dims, ratio, volume, clamp=args.clamp)
    _emit(theory.format_cd_csv(rows), args.out)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "trace": cmd_trace, "bench": cmd_bench, "bound": cmd_bound}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        if args.constants is not None:
            set_constants_file(args.constants)
        return COMMANDS[args.command](args)
    except (UsageError, ValueError, KeyError) as exc:
        print(f"lipoplus: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        print(f"lipoplus: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    finally:
        set_constants_file(None)


if __name__ == "__main__":
    sys.exit(main())
