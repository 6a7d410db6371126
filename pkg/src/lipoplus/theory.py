"""Upper bound on the probability that LIPO rejects a uniform candidate.

After ``t`` evaluations the rejected set is contained in ``t`` balls of
radius ``delta / kappa``, so the rejection probability is at most

    t * V_d * (delta / kappa) ** d / volume(domain)

with ``V_d`` the volume of the unit ball. Everything is computed in log
space: at ``d = 50`` the terms individually under- or overflow long before
the ratio does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .domain import BoxDomain, RngStream
from .lipschitz import accept_mask
from .objective import CountingObjective, Objective
from .optimizers import Kind, OptimizerSpec, StoppingRule, run


@dataclass(frozen=True)
class BoundParams:
    d: int
    kappa: float
    delta: float
    domain_volume: float
    t: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        if not self.domain_volume > 0:
            raise ValueError("domain_volume must be positive")
        if self.t < 0:
            raise ValueError("t must be non-negative")


def log_unit_ball_volume(d: int) -> float:
    if d < 1:
        raise ValueError("d must be at least 1")
    return 0.5 * d * math.log(math.pi) - math.lgamma(0.5 * d + 1)


def unit_ball_volume(d: int) -> float:
    """``pi^(d/2) / Gamma(d/2 + 1)``."""
    return math.exp(log_unit_ball_volume(d))


def log_rejection_bound(p: BoundParams) -> float:
    if p.t == 0 or p.delta == 0:
        return -math.inf
    return (math.log(p.t) + log_unit_ball_volume(p.d)
            + p.d * (math.log(p.delta) - math.log(p.kappa)) - math.log(p.domain_volume))


def rejection_bound(p: BoundParams, clamp: bool = False) -> float:
    """The bound itself; it is not a probability and may exceed 1 unless ``clamp``."""
    value = math.exp(log_rejection_bound(p))
    return min(value, 1.0) if clamp else value


def exp_norm_ratio(d: int) -> float:
    """``delta / kappa`` for ``exp(||x||)`` on ``[-1, 1]^d``.

    The image spans ``[1, e^sqrt(d)]`` and the gradient norm peaks at the
    corners, where it equals ``e^sqrt(d)``.
    """
    top = math.exp(math.sqrt(d))
    return (top - 1.0) / top


def cd_table(d_list: Iterable[int], delta_over_kappa: float | Callable[[int], float] = 1.0,
             domain_volume_fn: Callable[[int], float] = lambda d: 2.0 ** d,
             clamp: bool = False) -> list[tuple[int, float]]:
    """``(d, C_d)`` rows: the bound with ``t = 1``.

    The defaults (ratio 1, volume ``2^d`` of ``[-1, 1]^d``) give the usual
    printed constants; pass :func:`exp_norm_ratio` for the exact ratio of
    the ``exp(||x||)`` example.
    """
    d_list = list(d_list)
    if not d_list:
        raise ValueError("need at least one dimension")
    rows = []
    for d in d_list:
        ratio = delta_over_kappa(d) if callable(delta_over_kappa) else delta_over_kappa
        params = BoundParams(d=d, kappa=1.0, delta=ratio, domain_volume=domain_volume_fn(d), t=1)
        rows.append((d, rejection_bound(params, clamp=clamp)))
    return rows


def format_cd_csv(rows) -> str:
    lines = ["d,C_d"]
    lines += [f"{d},{c:.5e}" for d, c in rows]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RejectionEstimate:
    rate: float
    stderr: float
    per_seed: tuple[float, ...]
    shortfall: int  # seeds that hit the sample cap before t evaluations


def empirical_rejection_rate(objective: Objective, kappa: float, t: int, n_probe: int,
                             n_seeds: int, base_seed: int = 0,
                             sample_cap: int = 10_000_000) -> RejectionEstimate:
    """Fraction of fresh uniform candidates LIPO would reject after ``t`` evaluations."""
    if t < 1 or n_probe < 1 or n_seeds < 1:
        raise ValueError("t, n_probe and n_seeds must be positive")
    spec = OptimizerSpec(Kind.LIPO, kappa=kappa)
    stop = StoppingRule(budget=t, sample_cap=sample_cap)
    rates = []
    shortfall = 0
    for i in range(n_seeds):
        rng = RngStream(base_seed + i)
        result = run(CountingObjective(objective), spec, stop, rng)
        if result.n_evals < t:
            shortfall += 1
        probes = _probe_points(objective.domain, rng, n_probe)
        rejected = ~accept_mask(probes, result.history, kappa)
        rates.append(float(np.mean(rejected)))
    rates_arr = np.asarray(rates)
    stderr = float(rates_arr.std(ddof=1) / math.sqrt(n_seeds)) if n_seeds > 1 else 0.0
    return RejectionEstimate(float(rates_arr.mean()), stderr, tuple(rates), shortfall)


def _probe_points(domain: BoxDomain, rng: RngStream, n: int) -> np.ndarray:
    units = rng.peek_unit(n, domain.dim).copy()
    rng.consume(n)
    return domain.scale(units)
