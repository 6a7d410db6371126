"""PRS, LIPO, AdaLIPO and the + variants on one sampling loop.

Each iteration produces exactly one evaluation. Exploration iterations
evaluate the next uniform candidate; filtered iterations draw candidates
until one passes the Lipschitz acceptance test. Candidates are tested in
vectorised blocks, but the candidate stream is consumed strictly in order,
so results do not depend on the block size.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .domain import EvaluatedPoint, History, RngStream, RunTrace
from ._kernels import first_accepted
from .lipschitz import DEFAULT_ALPHA, KappaTracker
from .objective import CountingObjective, Objective

DEFAULT_SAMPLE_CAP = 100_000_000
DEFAULT_P = 0.1
DEFAULT_SLOPE_THRESHOLD = 600.0
DEFAULT_WINDOW = 5

_MIN_BLOCK = 64
_MAX_BLOCK = 1 << 16


class Kind(str, enum.Enum):
    PRS = "prs"
    LIPO = "lipo"
    LIPO_PLUS = "lipo+"
    ADALIPO = "adalipo"
    ADALIPO_PLUS = "adalipo+"
    ADALIPO_PLUS_NS = "adalipo+ns"

    @classmethod
    def parse(cls, text: str) -> "Kind":
        key = text.strip().lower().replace("_plus", "+").replace("|", "").replace("_", "")
        for kind in cls:
            if kind.value == key or kind.name.lower() == text.strip().lower():
                return kind
        raise ValueError(f"unknown optimizer {text!r}; choose from {', '.join(k.value for k in cls)}")

    @property
    def needs_kappa(self) -> bool:
        return self in (Kind.LIPO, Kind.LIPO_PLUS)

    @property
    def adaptive(self) -> bool:
        return self in (Kind.ADALIPO, Kind.ADALIPO_PLUS, Kind.ADALIPO_PLUS_NS)

    @property
    def uses_slope(self) -> bool:
        return self in (Kind.LIPO_PLUS, Kind.ADALIPO_PLUS)


class StopReason(str, enum.Enum):
    BUDGET = "budget"
    SLOPE = "slope"
    TARGET = "target"
    SAMPLE_CAP = "sample_cap"


@dataclass(frozen=True)
class StoppingRule:
    budget: int | None = None
    sample_cap: int = DEFAULT_SAMPLE_CAP
    slope_window: int | None = None
    slope_threshold: float | None = None
    target_value: float | None = None

    def __post_init__(self):
        if self.budget is not None and self.budget < 1:
            raise ValueError("budget must be positive")
        if self.sample_cap < 1:
            raise ValueError("sample_cap must be positive")
        if (self.slope_window is None) != (self.slope_threshold is None):
            raise ValueError("slope_window and slope_threshold go together")
        if self.slope_window is not None and self.slope_window < 2:
            raise ValueError("slope_window must be at least 2")

    @property
    def slope_active(self) -> bool:
        return self.slope_window is not None


@dataclass(frozen=True)
class OptimizerSpec:
    kind: Kind
    kappa: float | None = None
    p_fixed: float | None = None
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        if self.kind.needs_kappa and (self.kappa is None or not self.kappa >= 0):
            raise ValueError(f"{self.kind.value} needs a non-negative kappa")
        if self.kind is Kind.ADALIPO:
            if self.p_fixed is None:
                object.__setattr__(self, "p_fixed", DEFAULT_P)
            if not 0 < self.p_fixed <= 1:
                raise ValueError("p_fixed must lie in (0, 1]")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")


@dataclass
class RunResult:
    best: EvaluatedPoint
    n_evals: int
    n_samples: int
    stop_reason: StopReason
    trace: RunTrace
    kappa_final: float | None = None
    explored: list[bool] = field(default_factory=list)
    history: History | None = field(default=None, repr=False)

    def summary(self) -> dict:
        return {
            "best_point": [float(v) for v in self.best.point],
            "best_value": self.best.value,
            "n_evals": self.n_evals,
            "n_samples": self.n_samples,
            "stop_reason": self.stop_reason.value,
            "kappa_final": self.kappa_final,
        }


def exploration_probability(t: int) -> float:
    """Decaying exploration rate ``min(1, 1/ln t)``, with 1 at ``t = 1``."""
    if t < 1:
        raise ValueError(f"t must be at least 1, got {t}")
    if t == 1:
        return 1.0
    return min(1.0, 1.0 / math.log(t))


def slope_triggered(trace: RunTrace, w: int, threshold: float) -> bool:
    """Average candidate samples per evaluation over the last ``w`` rows."""
    if w < 2:
        raise ValueError("window must be at least 2")
    s = trace.cumulative_samples
    if len(s) < w + 1:
        return False
    return (s[-1] - s[-1 - w]) / w > threshold


class _Sampler:
    """Pulls candidates from the stream and applies the acceptance test."""

    def __init__(self, objective: CountingObjective, rng: RngStream, cap: int):
        self.domain = objective.domain
        self.objective = objective
        self.rng = rng
        self.cap = cap
        self.n_samples = 0
        self.block = _MIN_BLOCK

    def exhausted(self) -> bool:
        return self.n_samples >= self.cap

    def take_any(self):
        u = self.rng.next_unit(self.domain.dim)
        self._count(1)
        return self.domain.scale(u)

    def take_filtered(self, history: History, kappa: float):
        """First candidate passing the test, or ``None`` at the sample cap."""
        dim = self.domain.dim
        while not self.exhausted():
            n = min(self.block, self.cap - self.n_samples)
            cands = self.domain.scale(self.rng.peek_unit(n, dim))
            if math.isinf(kappa):
                k = 0
            else:
                k = first_accepted(cands, history.points, history.values,
                                   history.order_by_value, float(kappa), history.running_max)
            if k >= 0:
                self.rng.consume(k + 1)
                self._count(k + 1)
                self.block = max(_MIN_BLOCK, min(_MAX_BLOCK, 2 * (k + 1)))
                return cands[k].copy()
            self.rng.consume(n)
            self._count(n)
            self.block = min(_MAX_BLOCK, self.block * 2)
        return None

    def _count(self, n: int) -> None:
        self.n_samples += n
        self.objective.sample_count += n


def run(objective: CountingObjective | Objective, spec: OptimizerSpec,
        stop: StoppingRule, rng: RngStream | int) -> RunResult:
    """Maximise ``objective`` until one of the stopping rules fires."""
    if not isinstance(objective, CountingObjective):
        objective = CountingObjective(objective)
    if isinstance(rng, (int, np.integer)):
        rng = RngStream(int(rng))
    kind = spec.kind
    use_slope = kind.uses_slope and stop.slope_active

    history = History(objective.dim)
    trace = RunTrace()
    sampler = _Sampler(objective, rng, stop.sample_cap)
    tracker = KappaTracker(spec.alpha) if kind.adaptive else None
    explored: list[bool] = []

    def record(x, was_explored: bool):
        history.append(x, objective(x))
        trace.append(sampler.n_samples, history.running_max)
        explored.append(was_explored)
        if tracker is not None:
            tracker.update(history)

    def finished() -> StopReason | None:
        if stop.target_value is not None and history.running_max >= stop.target_value:
            return StopReason.TARGET
        if use_slope and slope_triggered(trace, stop.slope_window, stop.slope_threshold):
            return StopReason.SLOPE
        if stop.budget is not None and len(history) >= stop.budget:
            return StopReason.BUDGET
        return None

    record(sampler.take_any(), True)
    reason = finished()
    while reason is None:
        if sampler.exhausted():
            reason = StopReason.SAMPLE_CAP
            break
        t = len(history)
        if kind is Kind.PRS:
            explore = True
        elif kind.adaptive:
            p = spec.p_fixed if kind is Kind.ADALIPO else exploration_probability(t)
            coin = rng.bernoulli(p)
            explore = coin or t < 2
        else:
            explore = False

        if explore:
            x = sampler.take_any()
        else:
            kappa = spec.kappa if tracker is None else tracker.value
            x = sampler.take_filtered(history, kappa)
            if x is None:
                reason = StopReason.SAMPLE_CAP
                break
        record(x, explore)
        reason = finished()

    return RunResult(
        best=history.best(),
        n_evals=len(history),
        n_samples=sampler.n_samples,
        stop_reason=reason,
        trace=trace,
        kappa_final=spec.kappa if tracker is None else tracker.value,
        explored=explored,
        history=history,
    )


def maximize(objective: Objective, kind: str | Kind, *, seed: int = 0, budget: int | None = None,
             kappa: float | None = None, p: float | None = None, alpha: float = DEFAULT_ALPHA,
             slope_threshold: float = DEFAULT_SLOPE_THRESHOLD, window: int = DEFAULT_WINDOW,
             target: float | None = None, sample_cap: int = DEFAULT_SAMPLE_CAP) -> RunResult:
    """Convenience front end: builds the spec and stopping rule from keywords."""
    kind = Kind.parse(kind) if isinstance(kind, str) else Kind(kind)
    spec = OptimizerSpec(kind, kappa=kappa, p_fixed=p, alpha=alpha)
    slope = kind.uses_slope
    stop = StoppingRule(budget=budget, sample_cap=sample_cap,
                        slope_window=window if slope else None,
                        slope_threshold=slope_threshold if slope else None,
                        target_value=target)
    return run(CountingObjective(objective), spec, stop, RngStream(seed))


def minimize(objective: Objective, kind: str | Kind, **kwargs) -> RunResult:
    """Minimise by maximising ``-f``; best value is reported in the original sign."""
    target = kwargs.pop("target", None)
    result = maximize(objective.negated(), kind, target=None if target is None else -target, **kwargs)
    result.best = EvaluatedPoint(result.best.point, -result.best.value)
    return result
