"""Compiled kernel sums for one-dimensional covariates.

With sorted covariates the nonzero kernel weights of each row form a
contiguous band, so the sums cost O(n * band) instead of O(n^2) temporaries.
"""
from __future__ import annotations

import numpy as np
from numba import njit

FAMILY_CODES = {"epanechnikov2": 0, "epanechnikov4": 1, "uniform": 2}


@njit(cache=True)
def _k(u2, family):
    if u2 > 1.0:
        return 0.0
    if family == 0:
        return 0.75 * (1.0 - u2)
    if family == 1:
        return (15.0 / 32.0) * (1.0 - u2) * (3.0 - 7.0 * u2)
    return 0.5


@njit(cache=True)
def band_sums(xs, ys, h, c, family, include_self):
    """Kernel-weighted sums over sorted ``xs``: returns ``(sum w*y, sum w)``."""
    n = xs.shape[0]
    num = np.zeros(n)
    den = np.zeros(n)
    inv = 1.0 / (h * h)
    inv_c2 = 1.0 / (c * c)
    reach = c * h * (1.0 + 1e-9)
    k0 = _k(0.0, family) / c
    for i in range(n):
        xi = xs[i]
        if include_self:
            num[i] += k0 * ys[i]
            den[i] += k0
        j = i + 1
        while j < n and xs[j] - xi <= reach:
            d = xs[j] - xi
            w = _k(d * d * inv * inv_c2, family) / c
            num[i] += w * ys[j]
            den[i] += w
            num[j] += w * ys[i]
            den[j] += w
            j += 1
    return num, den


def loo_sums_1d(x: np.ndarray, y: np.ndarray, h: float, c: float, family: str):
    """Leave-one-out numerator and denominator in the original order."""
    order = np.argsort(x, kind="stable")
    num_s, den_s = band_sums(np.ascontiguousarray(x[order]), np.ascontiguousarray(y[order]),
                             float(h), float(c), FAMILY_CODES[family], False)
    num = np.empty_like(num_s)
    den = np.empty_like(den_s)
    num[order] = num_s
    den[order] = den_s
    return num, den
