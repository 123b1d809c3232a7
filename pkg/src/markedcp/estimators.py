"""Change-point estimators built on the marked residual process.

``variant="ks"`` takes the sup-norm over marks at each time, ``variant="cvm"``
the empirical mean of squares over the observed covariates. In both cases the
estimate is the smallest ``k / n`` at which the profile reaches its maximum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ConfigError, EstimationError
from .kernels import KernelSpec
from .mep import CusumProfile, MarkedResiduals, build_marked_residuals, compute_profile
from .smoothing import Sample, TrimRegion, default_trim, nw_predict, select_bandwidth

MIN_N = 10
VARIANTS = ("ks", "cvm")


@dataclass(frozen=True)
class EstimatorConfig:
    """Estimator settings.

    ``bandwidth`` is a positive float (fixed) or ``"cv"``. ``trim`` is
    ``"none"``, ``"auto"`` (box from :func:`default_trim`), a positive float
    (box half-width around the origin) or a :class:`TrimRegion`.
    """

    variant: str = "ks"
    kernel: KernelSpec = field(default_factory=KernelSpec)
    bandwidth: Union[float, str] = "cv"
    trim: Union[str, float, TrimRegion] = "auto"
    tie_tol: float = 1e-12
    cv_grid: Optional[tuple] = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be 'ks' or 'cvm', got {self.variant!r}")
        if isinstance(self.bandwidth, str):
            if self.bandwidth != "cv":
                raise ConfigError(f"bandwidth must be 'cv' or a positive number, got {self.bandwidth!r}")
        elif not (math.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise ConfigError("fixed bandwidth must be positive")
        if not 0.0 <= self.tie_tol <= 1e-6:
            raise ConfigError("tie_tol must lie in [0, 1e-6]")
        if isinstance(self.trim, str) and self.trim not in ("none", "auto"):
            raise ConfigError(f"trim must be 'none', 'auto' or a positive number, got {self.trim!r}")
        if isinstance(self.trim, (int, float)) and not (math.isfinite(self.trim) and self.trim > 0):
            raise ConfigError("trim half-width must be positive")

    def resolve_trim(self, sample: Sample) -> TrimRegion:
        if isinstance(self.trim, TrimRegion):
            return self.trim
        if self.trim == "none":
            return TrimRegion()
        if self.trim == "auto":
            return default_trim(sample)
        return TrimRegion.box((float(self.trim),) * sample.d)


@dataclass
class ChangePointEstimate:
    s_hat: float
    k_hat: int
    stat_max: float
    profile: CusumProfile
    bandwidth_used: Optional[float] = None
    time_label: Optional[str] = None
    variant: str = "ks"

    @property
    def n(self) -> int:
        return self.profile.n

    def to_dict(self) -> dict:
        return {
            "s_hat": self.s_hat,
            "k_hat": self.k_hat,
            "time_label": self.time_label,
            "stat_max": self.stat_max,
            "bandwidth_used": self.bandwidth_used,
            "variant": self.variant,
            "n": self.n,
        }


def argmax_min_index(values, tie_tol: float = 1e-12) -> int:
    """Smallest index whose value is within ``tie_tol * max`` of the maximum."""
    values = np.asarray(values, dtype=float)
    top = float(values.max())
    return int(np.flatnonzero(values >= top - tie_tol * abs(top))[0])


def estimate_from_residuals(mr: MarkedResiduals, variant: str = "ks", tie_tol: float = 1e-12,
                            labels: Optional[Sequence] = None, bandwidth: Optional[float] = None,
                            fast: bool = True) -> ChangePointEstimate:
    """Profile + argmax step of the pipeline, starting from marked residuals."""
    profile = compute_profile(mr, fast=fast)
    return estimate_from_profile(profile, variant, tie_tol, labels, bandwidth)


def estimate_from_profile(profile: CusumProfile, variant: str = "ks", tie_tol: float = 1e-12,
                          labels: Optional[Sequence] = None,
                          bandwidth: Optional[float] = None) -> ChangePointEstimate:
    values = profile.values(variant)
    n = profile.n
    k = argmax_min_index(values, tie_tol)
    label = None
    # labels[k] is the first observation of the new regime; none exists for k = n
    if labels is not None and k < n:
        label = str(labels[k])
    return ChangePointEstimate(
        s_hat=k / n,
        k_hat=k,
        stat_max=float(values[k]),
        profile=profile,
        bandwidth_used=bandwidth,
        time_label=label,
        variant=variant,
    )


def fit_residuals(sample: Sample, config: EstimatorConfig):
    """Bandwidth, trimming and the full-sample fit; returns ``(mr, h)``."""
    kernel = config.kernel
    if kernel.dimension != sample.d:
        kernel = KernelSpec(kernel.family, kernel.support_c, sample.d)
    trim = config.resolve_trim(sample)
    if config.bandwidth == "cv":
        h = select_bandwidth(sample, kernel, trim, config.cv_grid).h
    else:
        h = float(config.bandwidth)
    fitted = nw_predict(sample, kernel, h, sample.x)
    return build_marked_residuals(sample, fitted, trim), h


def estimate_change(sample: Sample, config: Optional[EstimatorConfig] = None) -> ChangePointEstimate:
    """Estimate the rescaled change point of the regression function."""
    config = config or EstimatorConfig()
    if sample.n < MIN_N:
        raise EstimationError(f"need at least {MIN_N} observations, got {sample.n}")
    mr, h = fit_residuals(sample, config)
    return estimate_from_residuals(mr, config.variant, config.tie_tol, sample.time_labels, h)


def lag_embed(series, labels: Optional[Sequence] = None, min_length: int = MIN_N + 1) -> Sample:
    """Pairs ``(x_t, y_t) = (series[t-1], series[t])`` for ``t = 1..n``.

    Labels, if given, align with ``series`` and are shifted onto ``y``.
    """
    series = np.asarray(series, dtype=float).ravel()
    if series.shape[0] < max(min_length, 3):
        raise ConfigError(f"autoregressive series needs at least {MIN_N + 1} values, got {series.shape[0]}")
    if labels is not None:
        labels = tuple(labels)
        if len(labels) != series.shape[0]:
            raise ConfigError("labels must align with the series")
        labels = labels[1:]
    return Sample(series[:-1, None], series[1:], labels)


def ks_statistic(profile: CusumProfile, n: Optional[int] = None) -> float:
    """``sqrt(n) * max_k ks[k]``, the scaled statistic for plots."""
    n = profile.n if n is None else n
    return math.sqrt(n) * float(np.max(profile.ks))
