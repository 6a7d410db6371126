"""Compiled inner loop of the acceptance test."""

import numpy as np
from numba import njit


@njit(cache=True)
def first_accepted(cands, X, f, order, kappa, top):
    """Index of the first row of ``cands`` passing the test, or -1.

    ``order`` lists evaluated points by increasing value, so a candidate
    usually meets the exclusion ball that rejects it within a few terms.
    """
    n, d = cands.shape
    for j in range(n):
        ok = True
        for idx in order:
            fi = f[idx]
            if fi >= top:
                break
            acc = 0.0
            for k in range(d):
                diff = cands[j, k] - X[idx, k]
                acc += diff * diff
            if fi + kappa * np.sqrt(acc) < top:
                ok = False
                break
        if ok:
            return j
    return -1
