"""
Compiled kernels for the opt-in parallel energy reduction.

Per-row partial sums are reduced in parallel, so results match the serial
path to rounding but are not bit-identical to it.
"""
import numpy as np
from numba import njit, prange


@njit(parallel=True, cache=True)
def riesz_row_sums(points, s, tol):
    """Row sums of ||p_i - p_j||^(-s) over j != i; pairs closer than tol contribute 0."""
    n, d = points.shape
    out = np.zeros(n)
    tol2 = tol * tol
    for i in prange(n):
        total = 0.0
        for j in range(n):
            if i == j:
                continue
            r2 = 0.0
            for k in range(d):
                diff = points[i, k] - points[j, k]
                r2 += diff * diff
            if r2 >= tol2:
                total += r2 ** (-0.5 * s)
        out[i] = total
    return out
