"""Objectives, evaluation counting and the benchmark suite.

Every objective is written for maximisation. Benchmark formulas accept an
array whose last axis holds the coordinates, so the same code serves
single evaluations and the vectorised oracles used to build the constants
file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from .domain import BoxDomain, as_point


@dataclass(frozen=True)
class Objective:
    name: str
    domain: BoxDomain
    func: Callable[[np.ndarray], np.ndarray]

    @property
    def dim(self) -> int:
        return self.domain.dim

    def __call__(self, x) -> float:
        return float(self.func(np.asarray(x, dtype=np.float64)))

    def batch(self, xs: np.ndarray) -> np.ndarray:
        return np.asarray(self.func(np.asarray(xs, dtype=np.float64)), dtype=np.float64)

    def negated(self) -> "Objective":
        """The same problem written the other way round (``-f``)."""
        inner = self.func
        return Objective(f"-{self.name}", self.domain, lambda x: -inner(x))


class CountingObjective:
    """Wraps an objective and counts calls and candidate samples."""

    def __init__(self, inner: Objective):
        self.inner = inner
        self.eval_count = 0
        self.sample_count = 0

    @property
    def domain(self) -> BoxDomain:
        return self.inner.domain

    @property
    def dim(self) -> int:
        return self.inner.dim

    @property
    def name(self) -> str:
        return self.inner.name

    def __call__(self, x) -> float:
        self.eval_count += 1
        value = self.inner(x)
        if not np.isfinite(value):
            raise ValueError(f"{self.name} returned {value} at {x}")
        return value


@dataclass(frozen=True)
class BenchmarkFunction:
    objective: Objective
    max_value: float
    mean_value: float
    lipschitz_constant: float
    provenance: str = ""

    def __post_init__(self):
        if self.mean_value > self.max_value:
            raise ValueError("mean_value cannot exceed max_value")
        if not self.lipschitz_constant > 0:
            raise ValueError("lipschitz_constant must be positive")

    @property
    def name(self) -> str:
        return self.objective.name

    @property
    def domain(self) -> BoxDomain:
        return self.objective.domain


def himmelblau(x):
    x0, x1 = x[..., 0], x[..., 1]
    return -((x0 ** 2 + x1 - 11) ** 2 + (x0 + x1 ** 2 - 7) ** 2)


def holder(x):
    # Hölder table with the outer minus dropped: maximising it finds the
    # usual minima.
    x0, x1 = x[..., 0], x[..., 1]
    r = np.sqrt(x0 ** 2 + x1 ** 2)
    return np.abs(np.sin(x0) * np.cos(x1) * np.exp(np.abs(1 - r / np.pi)))


def rastrigin(x):
    d = x.shape[-1]
    return -(10 * d + np.sum(x ** 2 - 10 * np.cos(2 * np.pi * x), axis=-1))


def rosenbrock(x):
    return -np.sum(100 * (x[..., 1:] - x[..., :-1] ** 2) ** 2 + (1 - x[..., :-1]) ** 2, axis=-1)


def sphere(x):
    return -np.sum(x ** 2, axis=-1)


def square(x):
    return np.sum(x ** 2, axis=-1)


# name -> (formula, (low, high) per coordinate, fixed dimension or None)
FORMULAS: dict[str, tuple[Callable, tuple[float, float], int | None]] = {
    "himmelblau": (himmelblau, (-5.0, 5.0), 2),
    "holder": (holder, (-10.0, 10.0), 2),
    "rastrigin": (rastrigin, (-5.12, 5.12), None),
    "rosenbrock": (rosenbrock, (-2.048, 2.048), None),
    "sphere": (sphere, (-5.12, 5.12), None),
    "square": (square, (-10.0, 10.0), None),
}

BENCHMARK_NAMES = tuple(FORMULAS)

_DEFAULT_CONSTANTS = "benchmarks.json"
_constants_path: Path | None = None


def make_objective(name: str, dim: int = 2) -> Objective:
    try:
        func, (low, high), fixed = FORMULAS[name]
    except KeyError:
        raise ValueError(f"unknown benchmark {name!r}; choose from {', '.join(FORMULAS)}") from None
    if fixed is not None and dim != fixed:
        raise ValueError(f"{name} is only defined for d={fixed}")
    if dim < 1 or (name == "rosenbrock" and dim < 2):
        raise ValueError(f"invalid dimension {dim} for {name}")
    return Objective(name, BoxDomain.cube(low, high, dim), func)


def set_constants_file(path: str | Path | None) -> None:
    """Use ``path`` instead of the bundled constants (``None`` restores them)."""
    global _constants_path
    _constants_path = None if path is None else Path(path)


def load_constants(path: str | Path | None = None) -> list[dict]:
    path = path if path is not None else _constants_path
    if path is None:
        text = resources.files("lipoplus.data").joinpath(_DEFAULT_CONSTANTS).read_text()
    else:
        text = Path(path).read_text()
    return json.loads(text)


def make_benchmark(name: str, dim: int = 2) -> BenchmarkFunction:
    """Benchmark ``name`` with its maximum, domain mean and Lipschitz constant."""
    objective = make_objective(name, dim)
    for entry in load_constants():
        if entry["name"] == name and entry["dim"] == dim:
            break
    else:
        raise ValueError(f"no constants recorded for {name} in dimension {dim}")
    domain = BoxDomain(np.asarray(entry["lower"], float), np.asarray(entry["upper"], float))
    objective = Objective(name, domain, objective.func)
    return BenchmarkFunction(
        objective,
        max_value=float(entry["max_value"]),
        mean_value=float(entry["mean_value"]),
        lipschitz_constant=float(entry["kappa"]),
        provenance=entry.get("provenance", ""),
    )


def target_level(bench: BenchmarkFunction, theta: float) -> float:
    """Value to reach: the domain mean at ``theta=0``, the maximum at ``theta=1``."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    gap = bench.max_value - bench.mean_value
    return bench.max_value - gap * (1.0 - theta)


def exp_norm_objective(dim: int) -> Objective:
    """``exp(||x||)`` on ``[-1, 1]^d``, the high-dimension probe function."""
    return Objective(f"exp_norm_{dim}d", BoxDomain.cube(-1.0, 1.0, dim),
                     lambda x: np.exp(np.sqrt(np.sum(x ** 2, axis=-1))))


def as_objective(func: Callable, lower, upper, name: str = "user") -> Objective:
    """Wrap a plain scalar callable ``func(x) -> float`` on a box."""
    domain = BoxDomain(as_point(lower), as_point(upper))

    def vectorised(x):
        x = np.asarray(x)
        if x.ndim == 1:
            return func(x)
        flat = x.reshape(-1, x.shape[-1])
        return np.array([func(row) for row in flat]).reshape(x.shape[:-1])

    return Objective(name, domain, vectorised)
