"""Nadaraya-Watson regression, leave-one-out CV bandwidth choice and trimming."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, EstimationError
from ._band import loo_sums_1d
from .kernels import KernelSpec, product_weights_sq

# |sum_j K(.)| below this marks a prediction invalid (order-4 kernels can
# produce vanishing or negative denominators)
DENOMINATOR_EPS = 1e-10

# rows per block when forming query x sample weight matrices
_BLOCK = 1024
# sample sizes up to this keep the full squared-distance matrix during CV
_CACHE_MAX_N = 2500


@dataclass(frozen=True)
class Sample:
    """Observations in time order: covariates ``x`` (n x d), responses ``y``."""

    x: np.ndarray
    y: np.ndarray
    time_labels: Optional[tuple] = None

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        y = np.asarray(self.y, dtype=float).ravel()
        if x.ndim != 2:
            raise ConfigError("x must be a vector or an n x d matrix")
        if x.shape[0] != y.shape[0]:
            raise ConfigError(f"x has {x.shape[0]} rows but y has {y.shape[0]} entries")
        if y.shape[0] < 2:
            raise ConfigError("a sample needs at least 2 observations")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ConfigError("sample contains non-finite values")
        labels = self.time_labels
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != y.shape[0]:
                raise ConfigError("time_labels length does not match the sample")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "time_labels", labels)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def drop(self, i: int) -> "Sample":
        labels = None
        if self.time_labels is not None:
            labels = self.time_labels[:i] + self.time_labels[i + 1:]
        return Sample(np.delete(self.x, i, axis=0), np.delete(self.y, i), labels)


@dataclass(frozen=True)
class TrimRegion:
    """Indicator weight of the box ``center + [-c_n, c_n]^d``.

    ``mode="none"`` gives weight one everywhere.
    """

    mode: str = "none"
    c_n: Optional[tuple] = None
    center: Optional[tuple] = None

    def __post_init__(self):
        if self.mode not in ("none", "box"):
            raise ConfigError(f"unknown trim mode {self.mode!r}")
        if self.mode == "box":
            if self.c_n is None:
                raise ConfigError("box trimming needs c_n")
            c = tuple(float(v) for v in np.atleast_1d(self.c_n))
            if not all(math.isfinite(v) and v > 0 for v in c):
                raise ConfigError("trim half-width c_n must be positive and finite")
            object.__setattr__(self, "c_n", c)
            if self.center is not None:
                object.__setattr__(self, "center", tuple(float(v) for v in np.atleast_1d(self.center)))

    @classmethod
    def box(cls, c_n, center=None) -> "TrimRegion":
        return cls("box", c_n, center)

    def weights(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if self.mode == "none":
            return np.ones(x.shape[0])
        c = np.broadcast_to(np.asarray(self.c_n), (x.shape[1],))
        center = 0.0 if self.center is None else np.broadcast_to(np.asarray(self.center), (x.shape[1],))
        inside = np.all(np.abs(x - center) <= c, axis=1)
        return inside.astype(float)


@dataclass
class BandwidthSelection:
    h: float
    cv_scores: list = field(default_factory=list)


def _check_h(h: float) -> float:
    h = float(h)
    if not (math.isfinite(h) and h > 0):
        raise ConfigError(f"bandwidth must be positive and finite, got {h}")
    return h


def _sq_diffs(q: np.ndarray, x: np.ndarray) -> list[np.ndarray]:
    return [np.square(q[:, j, None] - x[None, :, j]) for j in range(x.shape[1])]


def nw_predict(sample: Sample, kernel: KernelSpec, h: float, query_points, leave_out: Optional[int] = None):
    """Nadaraya-Watson fit at ``query_points``.

    Returns ``(values, valid)``. Entries with ``valid == False`` had a kernel
    denominator below :data:`DENOMINATOR_EPS` in absolute value; their value
    is NaN. ``leave_out`` removes one observation from both sums.
    """
    h = _check_h(h)
    q = np.atleast_1d(np.asarray(query_points, dtype=float))
    if q.ndim == 1:
        q = q[:, None] if sample.d == 1 else q[None, :]
    if q.shape[1] != sample.d:
        raise ConfigError(f"query points have dimension {q.shape[1]}, sample has {sample.d}")
    if not np.all(np.isfinite(q)):
        raise ConfigError("query points must be finite")
    if kernel.dimension != sample.d:
        kernel = KernelSpec(kernel.family, kernel.support_c, sample.d)
    if leave_out is not None:
        sample = sample.drop(int(leave_out))

    # shifting by y[0] leaves the ratio unchanged and makes constants exact
    ref = sample.y[0]
    centred = sample.y - ref
    num = np.empty(q.shape[0])
    den = np.empty(q.shape[0])
    for start in range(0, q.shape[0], _BLOCK):
        block = q[start:start + _BLOCK]
        w = product_weights_sq(kernel, _sq_diffs(block, sample.x), h)
        num[start:start + _BLOCK] = w @ centred
        den[start:start + _BLOCK] = w.sum(axis=1)
    valid = np.abs(den) >= DENOMINATOR_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.where(valid, ref + num / np.where(valid, den, 1.0), np.nan)
    return values, valid


def _min_valid(n: int) -> int:
    return max(5, math.ceil(0.1 * n))


def _loocv_from_sq(sq: list[np.ndarray], y: np.ndarray, kernel: KernelSpec, h: float, keep: np.ndarray) -> float:
    w = product_weights_sq(kernel, sq, h)
    np.fill_diagonal(w, 0.0)
    centred = y - y[0]
    return _score(w @ centred, w.sum(axis=1), centred, keep)


def _score(num, den, y, keep) -> float:
    # y is centred the same way as num
    valid = (np.abs(den) >= DENOMINATOR_EPS) & keep
    if valid.sum() < _min_valid(y.shape[0]):
        return math.inf
    resid = y[valid] - num[valid] / den[valid]
    return float(np.mean(resid * resid))


def _loocv_blocked(sample: Sample, kernel: KernelSpec, h: float, keep: np.ndarray) -> float:
    n = sample.n
    centred = sample.y - sample.y[0]
    num = np.empty(n)
    den = np.empty(n)
    for start in range(0, n, _BLOCK):
        stop = min(n, start + _BLOCK)
        w = product_weights_sq(kernel, _sq_diffs(sample.x[start:stop], sample.x), h)
        rows = np.arange(stop - start)
        w[rows, rows + start] = 0.0
        num[start:stop] = w @ centred
        den[start:stop] = w.sum(axis=1)
    return _score(num, den, centred, keep)


def _loocv_band(sample: Sample, kernel: KernelSpec, h: float, keep: np.ndarray) -> float:
    centred = sample.y - sample.y[0]
    num, den = loo_sums_1d(sample.x[:, 0], centred, h, kernel.support_c, kernel.family)
    return _score(num, den, centred, keep)


def loocv_score(sample: Sample, kernel: KernelSpec, h: float, trim: TrimRegion) -> float:
    """Mean squared leave-one-out residual over trimmed, validly predicted points.

    Returns ``inf`` when fewer than ``max(5, 0.1 n)`` points qualify.
    """
    h = _check_h(h)
    if kernel.dimension != sample.d:
        kernel = KernelSpec(kernel.family, kernel.support_c, sample.d)
    keep = trim.weights(sample.x) > 0
    return _loocv_blocked(sample, kernel, h, keep)


def default_grid(sample: Sample, size: int = 20) -> np.ndarray:
    """Log-spaced grid on [h0/4, 4 h0] around a Silverman-type pilot h0."""
    scale = float(np.mean(np.std(sample.x, axis=0, ddof=1)))
    if not scale > 0:
        raise ConfigError("covariates have zero variance; cannot build a bandwidth grid")
    h0 = 1.06 * scale * sample.n ** (-1.0 / (4 + sample.d))
    return np.geomspace(0.25 * h0, 4.0 * h0, size)


def select_bandwidth(sample: Sample, kernel: KernelSpec, trim: TrimRegion,
                     grid: Optional[Sequence[float]] = None) -> BandwidthSelection:
    """Pick the grid bandwidth with the smallest LOOCV score (ties -> smaller h)."""
    if grid is None or len(grid) == 0:
        grid = default_grid(sample)
    grid = sorted(_check_h(h) for h in grid)
    if kernel.dimension != sample.d:
        kernel = KernelSpec(kernel.family, kernel.support_c, sample.d)
    keep = trim.weights(sample.x) > 0

    if sample.d == 1:
        scores = [(h, _loocv_band(sample, kernel, h, keep)) for h in grid]
    elif sample.n <= _CACHE_MAX_N:
        sq = _sq_diffs(sample.x, sample.x)
        scores = [(h, _loocv_from_sq(sq, sample.y, kernel, h, keep)) for h in grid]
    else:
        scores = [(h, _loocv_blocked(sample, kernel, h, keep)) for h in grid]

    best_h, best = None, math.inf
    for h, s in scores:
        if s < best:
            best_h, best = h, s
    if best_h is None:
        raise EstimationError("bandwidth selection failed")
    return BandwidthSelection(best_h, scores)


def trim_halfwidth(scale, n: float, d: int) -> np.ndarray:
    """Half-width ``scale * (log n)^(1/d)`` of the default trimming box."""
    return np.asarray(scale, dtype=float) * math.log(n) ** (1.0 / d)


def default_trim(sample: Sample) -> TrimRegion:
    """Box around the covariate mean with half-width ``s_x (log n)^(1/d)``."""
    s = np.std(sample.x, axis=0, ddof=1)
    if np.any(s <= 0):
        raise ConfigError("zero-variance covariate dimension; cannot size the trim box")
    c = trim_halfwidth(s, sample.n, sample.d)
    return TrimRegion.box(tuple(c), tuple(np.mean(sample.x, axis=0)))
