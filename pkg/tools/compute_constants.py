"""Regenerate ``src/lipoplus/data/benchmarks.json``.

Maxima come from a dense grid followed by local refinement, domain means
from composite Gauss-Legendre quadrature (closed forms where they exist),
and Lipschitz constants from the largest analytic gradient norm seen on a
dense grid, refined locally and inflated by 1%.

    python tools/compute_constants.py > src/lipoplus/data/benchmarks.json
"""

import json
import sys

import numpy as np
from scipy import optimize

from lipoplus.objective import FORMULAS, make_objective

SAFETY = 1.01
GRID = 2001


def grad_himmelblau(x):
    x0, x1 = x[..., 0], x[..., 1]
    a = x0 ** 2 + x1 - 11
    b = x0 + x1 ** 2 - 7
    return -np.stack([4 * x0 * a + 2 * b, 2 * a + 4 * x1 * b], axis=-1)


def grad_holder(x):
    x0, x1 = x[..., 0], x[..., 1]
    r = np.sqrt(x0 ** 2 + x1 ** 2)
    g = np.sin(x0) * np.cos(x1)
    h = np.exp(np.abs(1 - r / np.pi))
    dg = np.stack([np.cos(x0) * np.cos(x1), -np.sin(x0) * np.sin(x1)], axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        dr = np.where(r[..., None] > 0, x / r[..., None], 0.0)
    dh = h[..., None] * np.sign(1 - r / np.pi)[..., None] * (-1 / np.pi) * dr
    return np.sign(g)[..., None] * (h[..., None] * dg + g[..., None] * dh) + 0 * x


def grad_rastrigin(x):
    return -(2 * x + 20 * np.pi * np.sin(2 * np.pi * x))


def grad_rosenbrock(x):
    x0, x1 = x[..., 0], x[..., 1]
    return -np.stack([-400 * x0 * (x1 - x0 ** 2) - 2 * (1 - x0), 200 * (x1 - x0 ** 2)], axis=-1)


GRADS = {
    "himmelblau": grad_himmelblau,
    "holder": grad_holder,
    "rastrigin": grad_rastrigin,
    "rosenbrock": grad_rosenbrock,
    "sphere": lambda x: -2 * x,
    "square": lambda x: 2 * x,
}


def grid2(lo, hi, n=GRID):
    g = np.linspace(lo, hi, n)
    xx, yy = np.meshgrid(g, g, indexing="ij")
    return np.stack([xx, yy], axis=-1)


def grid_max(fun, lo, hi, top=20):
    """Dense grid maximum of ``fun`` refined by bounded local search."""
    pts = grid2(lo, hi).reshape(-1, 2)
    vals = fun(pts)
    best = float(np.max(vals))
    for i in np.argsort(vals)[-top:]:
        res = optimize.minimize(lambda z: -float(fun(z)), pts[i], bounds=[(lo, hi)] * 2,
                                method="L-BFGS-B", options={"ftol": 1e-15, "gtol": 1e-12})
        best = max(best, -float(res.fun))
    return best


def gauss_mean(fun, lo, hi, panels=400, order=8):
    """Domain mean over ``[lo, hi]^2`` by composite Gauss-Legendre."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, panels + 1)
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    xs = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    ws = (half[:, None] * weights[None, :]).ravel()
    total = 0.0
    for x, w in zip(xs, ws):
        pts = np.stack([np.full_like(xs, x), xs], axis=-1)
        total += w * np.sum(ws * fun(pts))
    return total / (hi - lo) ** 2


def closed_form_mean(name, a, d):
    if name == "sphere":
        return -d * a ** 2 / 3
    if name == "square":
        return d * a ** 2 / 3
    if name == "rastrigin":
        mean_cos = np.sin(2 * np.pi * a) / (2 * np.pi * a)
        return -(10 * d + d * (a ** 2 / 3 - 10 * mean_cos))
    if name == "rosenbrock":
        ex2, ex4 = a ** 2 / 3, a ** 4 / 5
        per_term = 100 * (ex2 + ex4) + 1 + ex2
        return -(d - 1) * per_term
    return None


def entry(name, d):
    obj = make_objective(name, d)
    lo, hi = FORMULAS[name][1]
    notes = []
    if name in ("rastrigin", "sphere", "rosenbrock", "himmelblau"):
        max_value = 0.0
        notes.append("max: known optimum value 0")
    elif name == "square":
        max_value = d * hi ** 2
        notes.append("max: corner value d*10^2")
    else:
        max_value = grid_max(obj.batch, lo, hi)
        notes.append(f"max: {GRID}^2 grid + L-BFGS-B refinement")

    mean = closed_form_mean(name, hi, d)
    if mean is not None:
        notes.append("mean: closed-form box integral")
    else:
        mean = gauss_mean(obj.batch, lo, hi)
        notes.append("mean: composite Gauss-Legendre 400 panels x 8 nodes per axis")

    grad = GRADS[name]
    if name in ("rastrigin", "sphere", "square"):
        # separable: the per-coordinate maximum is reached in every coordinate at once
        g = np.linspace(lo, hi, 2_000_001)
        per = float(np.max(np.abs(grad(g))))
        kappa = per * np.sqrt(d)
        notes.append("kappa: separable 1-D grid max |df/dx_k| * sqrt(d), x1.01")
    else:
        pts = grid2(lo, hi).reshape(-1, 2)
        norms = np.linalg.norm(grad(pts), axis=-1)
        kappa = float(np.max(norms))
        norm_fun = lambda z: float(np.linalg.norm(grad(np.asarray(z))))
        for i in np.argsort(norms)[-20:]:
            res = optimize.minimize(lambda z: -norm_fun(z), pts[i], bounds=[(lo, hi)] * 2,
                                    method="L-BFGS-B")
            kappa = max(kappa, -float(res.fun))
        notes.append(f"kappa: {GRID}^2 grid max gradient norm + local refinement, x1.01")
    return {
        "name": name,
        "dim": d,
        "lower": [lo] * d,
        "upper": [hi] * d,
        "max_value": float(max_value),
        "mean_value": float(mean),
        "kappa": float(kappa * SAFETY),
        "provenance": "; ".join(notes),
    }


def main():
    entries = []
    for name in FORMULAS:
        dims = [2] if FORMULAS[name][2] is not None or name == "rosenbrock" else range(1, 11)
        for d in dims:
            entries.append(entry(name, d))
    json.dump(entries, sys.stdout, indent=1)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
