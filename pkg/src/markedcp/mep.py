"""Sequential marked empirical process of residuals and its per-time profiles.

For a time index ``k`` and mark ``z`` the process is

    T(k/n, z) = (1/n) * sum_{i <= k} residual_i * weight_i * 1{x_i <= z}

(componentwise ``<=``). As a function of ``z`` it is a step function that
jumps only at observed coordinates, so its supremum over ``z`` is attained on
a finite evaluation set:

* d = 1: the observed points (exact), O(n log n) through a segment tree;
* d = 2: the coordinate lattice (exact), O(n^3);
* d > 2: the observed points only, a lower bound.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import EstimationError
from .segtree import RangeAddExtremaTree, RangeAddSumTree
from .smoothing import Sample, TrimRegion

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MarkedResiduals:
    residual: np.ndarray
    weight: np.ndarray
    marks: np.ndarray
    order_by_dim: tuple

    @property
    def n(self) -> int:
        return self.residual.shape[0]

    @property
    def d(self) -> int:
        return self.marks.shape[1]

    @property
    def weighted(self) -> np.ndarray:
        # weight-0 residuals may be NaN (invalid fit); they must not leak
        return np.where(self.weight > 0, self.residual, 0.0) * self.weight


def marked_residuals(residual, marks, weight=None) -> MarkedResiduals:
    """Assemble :class:`MarkedResiduals` from raw arrays (also a test seam)."""
    residual = np.asarray(residual, dtype=float).ravel()
    marks = np.asarray(marks, dtype=float)
    if marks.ndim == 1:
        marks = marks[:, None]
    if marks.shape[0] != residual.shape[0]:
        raise ValueError("marks and residuals differ in length")
    if weight is None:
        weight = np.ones_like(residual)
    weight = np.asarray(weight, dtype=float).ravel()
    order = tuple(np.argsort(marks[:, j], kind="stable") for j in range(marks.shape[1]))
    return MarkedResiduals(residual, weight, marks, order)


def build_marked_residuals(sample: Sample, fitted, trim: TrimRegion) -> MarkedResiduals:
    """Residuals of a full-sample fit, marked by the covariates.

    ``fitted`` is the ``(values, valid)`` pair returned by ``nw_predict`` at
    the sample's own covariates. Invalid fits get weight zero.
    """
    values, valid = fitted
    values = np.asarray(values, dtype=float)
    valid = np.asarray(valid, dtype=bool)
    weight = trim.weights(sample.x) * valid
    if not np.any(weight > 0):
        raise EstimationError("trim region empty")
    residual = np.where(valid, sample.y - np.where(valid, values, 0.0), 0.0)
    return marked_residuals(residual, sample.x, weight)


@dataclass
class CusumProfile:
    """Per-time profiles, index ``k = 0..n`` corresponds to ``s = k/n``.

    ``ks[k]`` is the sup over marks of ``|T(k/n, z)|``; ``cvm[k]`` the mean of
    ``T(k/n, x_j)^2`` over all observed ``x_j``. ``unmarked`` is the classical
    CUSUM ``T(k/n, inf)``, kept as a diagnostic only.
    """

    ks: np.ndarray
    cvm: np.ndarray
    eval_mode: str
    unmarked: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.ks.shape[0] - 1

    def values(self, variant: str) -> np.ndarray:
        if variant == "ks":
            return self.ks
        if variant == "cvm":
            return self.cvm
        raise ValueError(f"unknown variant {variant!r}")


def _leq_matrix(marks: np.ndarray) -> np.ndarray:
    # A[i, j] = 1{x_i <= x_j componentwise}
    a = np.ones((marks.shape[0], marks.shape[0]), dtype=bool)
    for j in range(marks.shape[1]):
        col = marks[:, j]
        a &= col[:, None] <= col[None, :]
    return a


def _process_at_points(mr: MarkedResiduals) -> np.ndarray:
    """Matrix ``P[k-1, j] = n * T(k/n, x_j)`` for k = 1..n by direct summation."""
    contrib = mr.weighted[:, None] * _leq_matrix(mr.marks)
    return np.cumsum(contrib, axis=0)


def _ks_lattice_2d(mr: MarkedResiduals) -> np.ndarray:
    n = mr.n
    u1 = np.unique(mr.marks[:, 0])
    u2 = np.unique(mr.marks[:, 1])
    r1 = np.searchsorted(u1, mr.marks[:, 0], side="left")
    r2 = np.searchsorted(u2, mr.marks[:, 1], side="left")
    grid = np.zeros((u1.size, u2.size))
    out = np.zeros(n + 1)
    wr = mr.weighted
    for k in range(n):
        if wr[k] != 0.0:
            grid[r1[k]:, r2[k]:] += wr[k]
        out[k + 1] = np.abs(grid).max() / n
    return out


def eval_mode_for(d: int) -> str:
    return "lattice" if d == 2 else "observed_points"


def ks_profile_naive(mr: MarkedResiduals) -> np.ndarray:
    """Reference sup-norm profile by direct double summation."""
    n = mr.n
    if mr.d == 2:
        return _ks_lattice_2d(mr)
    out = np.zeros(n + 1)
    proc = _process_at_points(mr)
    out[1:] = np.abs(proc).max(axis=1) / n
    return out


def ks_profile_fast(mr: MarkedResiduals) -> np.ndarray:
    """Sup-norm profile in O(n log n) for one-dimensional marks.

    Positions of a segment tree are the marks in sorted order; moving from
    ``k-1`` to ``k`` adds the k-th weighted residual to every position whose
    mark is at least ``x_k`` (ties included). The profile reads the global
    extrema at the root.
    """
    if mr.d != 1:
        log.info("fast sup-norm profile needs d = 1 (got d = %d); using the direct computation", mr.d)
        return ks_profile_naive(mr)
    n = mr.n
    xs = mr.marks[mr.order_by_dim[0], 0]
    start = np.searchsorted(xs, mr.marks[:, 0], side="left")
    wr = mr.weighted
    tree = RangeAddExtremaTree(n)
    out = np.zeros(n + 1)
    hi = lo = 0.0
    for k in range(n):
        v = wr[k]
        if v != 0.0:
            tree.add(int(start[k]), n, float(v))
            hi, lo = tree.max, tree.min
        m = hi if hi > -lo else -lo
        out[k + 1] = (m if m > 0.0 else 0.0) / n
    return out


def cvm_profile_naive(mr: MarkedResiduals) -> np.ndarray:
    n = mr.n
    out = np.zeros(n + 1)
    proc = _process_at_points(mr) / n
    out[1:] = np.mean(proc * proc, axis=1)
    return out


def cvm_profile(mr: MarkedResiduals) -> np.ndarray:
    """Empirical Cramer-von Mises profile ``(1/n) sum_j T(k/n, x_j)^2``.

    Every observed covariate is an evaluation point, weight-0 ones included.
    For d = 1 the sum of squares is updated incrementally with a range-add /
    range-sum tree.
    """
    if mr.d != 1:
        return cvm_profile_naive(mr)
    n = mr.n
    xs = mr.marks[mr.order_by_dim[0], 0]
    start = np.searchsorted(xs, mr.marks[:, 0], side="left")
    wr = mr.weighted
    tree = RangeAddSumTree(n)
    out = np.zeros(n + 1)
    sumsq = 0.0
    scale = float(n) ** 3
    for k in range(n):
        v = float(wr[k])
        if v != 0.0:
            p = int(start[k])
            sumsq += 2.0 * v * tree.sum(p, n) + v * v * (n - p)
            tree.add(p, n, v)
        out[k + 1] = (sumsq if sumsq > 0.0 else 0.0) / scale
    return out


def unmarked_cusum(mr: MarkedResiduals) -> np.ndarray:
    out = np.zeros(mr.n + 1)
    out[1:] = np.cumsum(mr.weighted) / mr.n
    return out


def compute_profile(mr: MarkedResiduals, fast: bool = True) -> CusumProfile:
    ks = ks_profile_fast(mr) if fast else ks_profile_naive(mr)
    cvm = cvm_profile(mr) if fast else cvm_profile_naive(mr)
    return CusumProfile(ks, cvm, eval_mode_for(mr.d), unmarked_cusum(mr))
