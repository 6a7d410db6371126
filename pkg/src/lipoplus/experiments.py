"""Seeded multi-run campaigns over the benchmark suite.

Two modes:

* ``table1`` -- fixed evaluation budget per function; the + variants may
  stop early on the slope rule. Reports evaluations and the value gap to
  the known maximum.
* ``table2`` -- no budget; every run stops once the best value reaches the
  target level for ``theta``. Reports evaluations only.

Run ``i`` of a campaign always uses seed ``base_seed + i``, so results do
not depend on the worker count. Runs that hit the sample cap are counted
in ``n_capped`` and left out of the means.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .domain import RngStream
from .objective import (BENCHMARK_NAMES, BenchmarkFunction, CountingObjective, make_benchmark,
                        set_constants_file, target_level)
from .optimizers import (DEFAULT_P, DEFAULT_SAMPLE_CAP, DEFAULT_SLOPE_THRESHOLD, DEFAULT_WINDOW,
                         Kind, OptimizerSpec, RunResult, StoppingRule, StopReason, run)

TABLE1_BUDGETS = {"holder": 2000, "rastrigin": 1000, "sphere": 25}
DEFAULT_BUDGET = 1000

CSV_COLUMNS = ["benchmark", "optimizer", "mean_evals", "std_evals", "mean_dmax", "std_dmax",
               "mean_samples", "n_capped"]


class Mode(str, enum.Enum):
    TABLE1 = "table1"
    TABLE2 = "table2"


@dataclass
class CampaignSpec:
    benchmarks: list[str]
    optimizers: list[Kind]
    mode: Mode = Mode.TABLE1
    repetitions: int = 100
    base_seed: int = 0
    budgets: dict[str, int] = field(default_factory=dict)
    slope_threshold: float = DEFAULT_SLOPE_THRESHOLD
    window: int = DEFAULT_WINDOW
    theta: float = 0.99
    p: float = DEFAULT_P
    alpha: float = 0.01
    sample_cap: int = DEFAULT_SAMPLE_CAP
    kappa: dict[str, float] = field(default_factory=dict)  # per-benchmark overrides
    dim: int = 2

    def __post_init__(self):
        self.mode = Mode(self.mode)
        self.optimizers = [Kind.parse(k) if isinstance(k, str) else Kind(k) for k in self.optimizers]
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        for name in self.benchmarks:
            if name not in BENCHMARK_NAMES:
                raise ValueError(f"unknown benchmark {name!r}")
        if any(b < 1 for b in self.budgets.values()):
            raise ValueError("budgets must be positive")
        if not 0 <= self.theta <= 1:
            raise ValueError("theta must lie in [0, 1]")

    def budget_for(self, name: str) -> int:
        return self.budgets.get(name, TABLE1_BUDGETS.get(name, DEFAULT_BUDGET))

    @classmethod
    def from_json(cls, path: str | Path) -> "CampaignSpec":
        raw = json.loads(Path(path).read_text())
        unknown = set(raw) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown campaign keys: {', '.join(sorted(unknown))}")
        return cls(**raw)


@dataclass(frozen=True)
class RunOutcome:
    index: int
    n_evals: int
    n_samples: int
    best_value: float
    stop_reason: StopReason


@dataclass
class StatsRow:
    benchmark: str
    optimizer: str
    n_runs: int
    mean_evals: float
    std_evals: float
    mean_dmax: float
    std_dmax: float
    mean_samples: float
    n_capped: int
    stop_reasons: dict[str, int]

    def csv_fields(self) -> list[str]:
        return [self.benchmark, self.optimizer, f"{self.mean_evals:.6g}", f"{self.std_evals:.6g}",
                f"{self.mean_dmax:.6g}", f"{self.std_dmax:.6g}", f"{self.mean_samples:.6g}",
                str(self.n_capped)]


@dataclass
class CampaignStats:
    mode: Mode
    rows: list[StatsRow]
    outcomes: dict[tuple[str, str], list[RunOutcome]] = field(default_factory=dict, repr=False)

    def row(self, benchmark: str, optimizer: str | Kind) -> StatsRow:
        key = optimizer.value if isinstance(optimizer, Kind) else Kind.parse(optimizer).value
        for r in self.rows:
            if r.benchmark == benchmark and r.optimizer == key:
                return r
        raise KeyError((benchmark, key))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow(r.csv_fields())
        return buf.getvalue()

    def pretty(self) -> str:
        head = f"{'benchmark':<11} {'optimizer':<11} {'#evals':>17} {'d_max':>21} {'samples':>11} capped"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            evals = f"{r.mean_evals:.0f} ± {r.std_evals:.0f}"
            dmax = f"{r.mean_dmax:.4f} ± {r.std_dmax:.4f}"
            lines.append(f"{r.benchmark:<11} {r.optimizer:<11} {evals:>17} {dmax:>21} "
                         f"{r.mean_samples:>11.4g} {r.n_capped:>6}")
        return "\n".join(lines)


def summarize(outcomes: list[RunOutcome], bench: BenchmarkFunction, optimizer: str = "",
              exclude_capped: bool = False) -> StatsRow:
    """Mean and sample standard deviation (n-1 divisor) of evals and value gaps."""
    if not outcomes:
        raise ValueError("nothing to summarise")
    outcomes = sorted(outcomes, key=lambda o: o.index)
    capped = sum(o.stop_reason is StopReason.SAMPLE_CAP for o in outcomes)
    kept = [o for o in outcomes if not (exclude_capped and o.stop_reason is StopReason.SAMPLE_CAP)]
    if not kept:
        nan = math.nan
        return StatsRow(bench.name, optimizer, 0, nan, nan, nan, nan, nan, capped,
                        dict(Counter(o.stop_reason.value for o in outcomes)))
    evals = np.array([o.n_evals for o in kept], dtype=float)
    gaps = np.array([bench.max_value - o.best_value for o in kept])
    samples = np.array([o.n_samples for o in kept], dtype=float)

    def std(a):
        return float(a.std(ddof=1)) if a.size > 1 else 0.0

    return StatsRow(
        benchmark=bench.name,
        optimizer=optimizer,
        n_runs=len(kept),
        mean_evals=float(evals.mean()),
        std_evals=std(evals),
        mean_dmax=float(gaps.mean()),
        std_dmax=std(gaps),
        mean_samples=float(samples.mean()),
        n_capped=capped,
        stop_reasons=dict(Counter(o.stop_reason.value for o in outcomes)),
    )


def build_run(spec: CampaignSpec, name: str, kind: Kind) -> tuple[OptimizerSpec, StoppingRule]:
    bench = make_benchmark(name, spec.dim)
    kappa = spec.kappa.get(name, bench.lipschitz_constant) if kind.needs_kappa else None
    opt = OptimizerSpec(kind, kappa=kappa, p_fixed=spec.p if kind is Kind.ADALIPO else None,
                        alpha=spec.alpha)
    if spec.mode is Mode.TABLE1:
        slope = kind.uses_slope
        stop = StoppingRule(budget=spec.budget_for(name), sample_cap=spec.sample_cap,
                            slope_window=spec.window if slope else None,
                            slope_threshold=spec.slope_threshold if slope else None)
    else:
        stop = StoppingRule(budget=None, sample_cap=spec.sample_cap,
                            target_value=target_level(bench, spec.theta))
    return opt, stop


def _run_task(task) -> RunOutcome:
    name, dim, opt, stop, seed, index, constants = task
    if constants is not None:
        set_constants_file(constants)
    bench = make_benchmark(name, dim)
    result: RunResult = run(CountingObjective(bench.objective), opt, stop, RngStream(seed))
    return RunOutcome(index, result.n_evals, result.n_samples, result.best.value, result.stop_reason)


def run_campaign(spec: CampaignSpec, jobs: int = 1, constants_file: str | None = None) -> CampaignStats:
    tasks = []
    for name in spec.benchmarks:
        for kind in spec.optimizers:
            opt, stop = build_run(spec, name, kind)
            for i in range(spec.repetitions):
                tasks.append((name, spec.dim, opt, stop, spec.base_seed + i, i, constants_file))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_task, tasks, chunksize=4))
    else:
        outcomes = [_run_task(t) for t in tasks]

    grouped: dict[tuple[str, str], list[RunOutcome]] = {}
    for task, outcome in zip(tasks, outcomes):
        grouped.setdefault((task[0], task[2].kind.value), []).append(outcome)

    rows = []
    for name in spec.benchmarks:
        bench = make_benchmark(name, spec.dim)
        for kind in spec.optimizers:
            # a capped run never reached its own stopping rule, in either mode
            rows.append(summarize(grouped[(name, kind.value)], bench, kind.value,
                                  exclude_capped=True))
    return CampaignStats(spec.mode, rows, grouped)
