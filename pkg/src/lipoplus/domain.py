"""Geometry, randomness and bookkeeping shared by the optimizers.

Points are plain 1-D ``numpy`` float64 arrays. The containers below are
deliberately thin: a run owns one :class:`History`, one :class:`RunTrace`
and one :class:`RngStream`, and nothing is shared between runs.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

Point = np.ndarray


def as_point(coords) -> Point:
    """Validate and convert ``coords`` to a finite float64 vector."""
    x = np.asarray(coords, dtype=np.float64)
    if x.ndim != 1 or x.size < 1:
        raise ValueError(f"a point needs at least one coordinate, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("point coordinates must be finite")
    return x


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box ``[lower, upper]`` in R^d."""

    lower: Point
    upper: Point

    def __post_init__(self):
        lo = as_point(self.lower)
        hi = as_point(self.upper)
        if lo.shape != hi.shape:
            raise ValueError("lower and upper bounds differ in dimension")
        if not np.all(lo < hi):
            raise ValueError("every lower bound must be strictly below its upper bound")
        lo.flags.writeable = False
        hi.flags.writeable = False
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def cube(cls, low: float, high: float, dim: int) -> "BoxDomain":
        return cls(np.full(dim, float(low)), np.full(dim, float(high)))

    @property
    def dim(self) -> int:
        return self.lower.size

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower

    def volume(self) -> float:
        return float(np.prod(self.widths))

    def log_volume(self) -> float:
        return float(np.sum(np.log(self.widths)))

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return x.shape == self.lower.shape and bool(np.all((x >= self.lower) & (x <= self.upper)))

    def scale(self, unit: np.ndarray) -> np.ndarray:
        """Map points of ``[0, 1)^d`` onto the box."""
        return self.lower + unit * self.widths


def euclidean_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


class RngStream:
    """Seeded source of candidate points and coin flips.

    Two independent child generators are derived from ``seed``: one feeds
    uniform candidates, the other the Bernoulli draws. Candidates are
    served from a buffer so callers may look ahead at a block of points,
    consume only a prefix and leave the rest for later; the sequence of
    points handed out is the same whatever block sizes are requested.
    """

    _CHUNK = 4096

    def __init__(self, seed: int):
        self.seed = int(seed)
        points_seq, coins_seq = np.random.SeedSequence(self.seed).spawn(2)
        self._points = np.random.Generator(np.random.PCG64(points_seq))
        self._coins = np.random.Generator(np.random.PCG64(coins_seq))
        self._buffer = np.empty((0, 0))
        self._pos = 0

    def peek_unit(self, n: int, dim: int) -> np.ndarray:
        """Next ``n`` points of the unit cube, without consuming them."""
        if self._buffer.shape[1] != dim:
            if self._pos < self._buffer.shape[0]:
                raise RuntimeError("candidate stream already used with another dimension")
            self._buffer = np.empty((0, dim))
            self._pos = 0
        available = self._buffer.shape[0] - self._pos
        if available < n:
            # draws are row-major, so refill size does not change the stream
            extra = max(n - available, self._CHUNK)
            fresh = self._points.random((extra, dim))
            self._buffer = np.concatenate([self._buffer[self._pos:], fresh])
            self._pos = 0
        return self._buffer[self._pos:self._pos + n]

    def consume(self, n: int) -> None:
        if n > self._buffer.shape[0] - self._pos:
            raise ValueError("cannot consume points that were never peeked")
        self._pos += n

    def next_unit(self, dim: int) -> np.ndarray:
        u = self.peek_unit(1, dim)[0].copy()
        self.consume(1)
        return u

    def bernoulli(self, p: float) -> bool:
        return bool(self._coins.random() < p)


def sample_uniform(domain: BoxDomain, rng: RngStream) -> Point:
    """Draw one point uniformly from ``domain``."""
    return domain.scale(rng.next_unit(domain.dim))


@dataclass(frozen=True)
class EvaluatedPoint:
    point: Point
    value: float


class History:
    """Append-only record of evaluated points with running extremes."""

    def __init__(self, dim: int, capacity: int = 64):
        self.dim = dim
        self._x = np.empty((max(capacity, 1), dim))
        self._f = np.empty(max(capacity, 1))
        self._n = 0
        self.running_max = -np.inf
        self.running_min = np.inf
        self.argmax = -1
        # indices sorted by increasing value; big rejection balls come first
        self._order = np.empty(0, dtype=np.intp)

    def __len__(self) -> int:
        return self._n

    @property
    def points(self) -> np.ndarray:
        return self._x[:self._n]

    @property
    def values(self) -> np.ndarray:
        return self._f[:self._n]

    @property
    def order_by_value(self) -> np.ndarray:
        return self._order

    def append(self, x, value: float) -> None:
        value = float(value)
        if not np.isfinite(value):
            raise ValueError(f"objective returned a non-finite value: {value}")
        if self._n == self._x.shape[0]:
            self._x = np.concatenate([self._x, np.empty_like(self._x)])
            self._f = np.concatenate([self._f, np.empty_like(self._f)])
        self._x[self._n] = x
        self._f[self._n] = value
        pos = np.searchsorted(self._f[self._order], value, side="right")
        self._order = np.insert(self._order, pos, self._n)
        if value > self.running_max:
            self.running_max = value
            self.argmax = self._n
        self.running_min = min(self.running_min, value)
        self._n += 1

    def __getitem__(self, i: int) -> EvaluatedPoint:
        if not -self._n <= i < self._n:
            raise IndexError(i)
        i %= self._n
        return EvaluatedPoint(self._x[i].copy(), float(self._f[i]))

    def best(self) -> EvaluatedPoint:
        if self._n == 0:
            raise ValueError("empty history")
        return self[self.argmax]


@dataclass
class RunTrace:
    """Cumulative candidate samples and best value after each evaluation."""

    eval_index: list[int] = field(default_factory=list)
    cumulative_samples: list[int] = field(default_factory=list)
    best_value: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.eval_index)

    def append(self, cumulative_samples: int, best_value: float) -> None:
        self.eval_index.append(len(self.eval_index) + 1)
        self.cumulative_samples.append(int(cumulative_samples))
        self.best_value.append(float(best_value))

    def check(self) -> None:
        """Raise ``AssertionError`` if the monotonicity invariants are broken."""
        idx = np.asarray(self.eval_index)
        samples = np.asarray(self.cumulative_samples)
        best = np.asarray(self.best_value)
        assert np.array_equal(idx, np.arange(1, len(idx) + 1)), "eval_index must count from 1"
        assert np.all(np.diff(samples) >= 0), "cumulative_samples must not decrease"
        assert np.all(samples >= idx), "fewer samples than evaluations"
        assert np.all(np.diff(best) >= 0), "best_value must not decrease"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["eval_index", "cumulative_samples", "best_value"])
        for row in zip(self.eval_index, self.cumulative_samples, self.best_value):
            writer.writerow([row[0], row[1], f"{row[2]:.17g}"])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RunTrace":
        trace = cls()
        reader = csv.DictReader(io.StringIO(text))
        for row in reader:
            trace.eval_index.append(int(row["eval_index"]))
            trace.cumulative_samples.append(int(row["cumulative_samples"]))
            trace.best_value.append(float(row["best_value"]))
        return trace
