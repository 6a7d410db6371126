"""Lipschitz upper bound, acceptance test and slope-based constant estimate."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import History

DEFAULT_ALPHA = 0.01


def _check_history(history: History, kappa: float) -> None:
    if len(history) == 0:
        raise ValueError("the upper bound needs at least one evaluated point")
    if not kappa >= 0:
        raise ValueError(f"kappa must be non-negative, got {kappa}")


def upper_bound_at(x, history: History, kappa: float) -> float:
    """``min_i f(X_i) + kappa * ||x - X_i||`` over the evaluated points."""
    _check_history(history, kappa)
    x = np.asarray(x, dtype=np.float64)
    dist = np.sqrt(np.sum((history.points - x) ** 2, axis=1))
    return float(np.min(history.values + kappa * dist))


def accept_candidate(x, history: History, kappa: float) -> bool:
    """True when ``x`` may still improve on the best value (ties accept)."""
    return history.running_max <= upper_bound_at(x, history, kappa)


def accept_mask(candidates: np.ndarray, history: History, kappa: float,
                block: int = 32) -> np.ndarray:
    """Vectorised :func:`accept_candidate` over the rows of ``candidates``.

    Evaluated points are visited from the lowest value up, so the largest
    exclusion balls are tested first and most candidates drop out after a
    few blocks. Decisions are identical to the scalar test.
    """
    _check_history(history, kappa)
    top = history.running_max
    alive = np.arange(candidates.shape[0])
    order = history.order_by_value
    X = history.points
    f = history.values
    start = 0
    while alive.size and start < order.size:
        idx = order[start:start + block]
        start += block
        if f[idx[0]] >= top:
            break  # remaining terms are all >= top
        diff = candidates[alive, None, :] - X[None, idx, :]
        dist = np.sqrt(np.sum(diff ** 2, axis=2))
        ok = np.all(f[idx] + kappa * dist >= top, axis=1)
        alive = alive[ok]
        block = min(block * 2, 512)
    mask = np.zeros(candidates.shape[0], dtype=bool)
    mask[alive] = True
    return mask


@dataclass(frozen=True)
class KappaEstimate:
    """Grid-snapped Lipschitz constant ``(1 + alpha) ** index``.

    ``index`` is ``None`` while every observed slope is zero, in which case
    ``value`` is 0.
    """

    alpha: float
    index: int | None
    value: float

    @classmethod
    def from_slope(cls, slope: float, alpha: float = DEFAULT_ALPHA) -> "KappaEstimate":
        if not alpha > 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        if slope <= 0:
            return cls(alpha, None, 0.0)
        i = math.ceil(math.log(slope) / math.log1p(alpha))
        value = (1.0 + alpha) ** i
        # guard the ceil against rounding in the log ratio
        if value < slope:
            i += 1
        elif (1.0 + alpha) ** (i - 1) >= slope:
            i -= 1
        return cls(alpha, i, (1.0 + alpha) ** i)


def max_pairwise_slope(points: np.ndarray, values: np.ndarray) -> float:
    """Largest ``|f_i - f_j| / ||X_i - X_j||`` over distinct-point pairs.

    Raises ``ValueError`` if there is no pair of distinct points.
    """
    n = len(values)
    best = 0.0
    found = False
    for i in range(1, n):
        dist = np.sqrt(np.sum((points[:i] - points[i]) ** 2, axis=1))
        keep = dist > 0
        if np.any(keep):
            found = True
            best = max(best, float(np.max(np.abs(values[:i][keep] - values[i]) / dist[keep])))
    if not found:
        raise ValueError("slope estimate needs at least two distinct points")
    return best


def estimate_kappa(history: History, alpha: float = DEFAULT_ALPHA) -> KappaEstimate:
    """Full pair scan; see :class:`KappaTracker` for the incremental form."""
    return KappaEstimate.from_slope(max_pairwise_slope(history.points, history.values), alpha)


class KappaTracker:
    """Incremental estimate: each new point is compared with older ones only."""

    def __init__(self, alpha: float = DEFAULT_ALPHA):
        if not alpha > 0:
            raise ValueError(f"alpha must be positive, got {alpha}")
        self.alpha = alpha
        self.max_slope = 0.0
        self.n_pairs = 0
        self.estimate = KappaEstimate(alpha, None, 0.0)

    @property
    def value(self) -> float:
        return self.estimate.value

    def update(self, history: History) -> KappaEstimate:
        """Fold in the newest entry of ``history``."""
        n = len(history)
        if n < 2:
            return self.estimate
        X = history.points
        f = history.values
        dist = np.sqrt(np.sum((X[:-1] - X[-1]) ** 2, axis=1))
        keep = dist > 0
        self.n_pairs += int(np.count_nonzero(keep))
        if np.any(keep):
            slope = float(np.max(np.abs(f[:-1][keep] - f[-1]) / dist[keep]))
            if slope > self.max_slope:
                self.max_slope = slope
                self.estimate = KappaEstimate.from_slope(slope, self.alpha)
        return self.estimate
