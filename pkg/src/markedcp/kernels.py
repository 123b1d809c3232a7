"""Compactly supported smoothing kernels.

All univariate families are even polynomials on ``[-1, 1]``, so they are
evaluated through ``u**2``. A :class:`KernelSpec` rescales the family to the
support ``[-C, C]`` and forms product kernels in ``d`` dimensions.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError

FAMILIES = ("epanechnikov2", "epanechnikov4", "uniform")

# CLI / config aliases
KERNEL_ALIASES = {
    "epa2": "epanechnikov2",
    "epa4": "epanechnikov4",
    "uniform": "uniform",
    "epanechnikov2": "epanechnikov2",
    "epanechnikov4": "epanechnikov4",
}


@dataclass(frozen=True)
class KernelSpec:
    family: str = "epanechnikov4"
    support_c: float = 1.0
    dimension: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown kernel family {self.family!r}")
        if not (np.isfinite(self.support_c) and self.support_c > 0):
            raise ConfigError("support_c must be positive and finite")
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ConfigError("dimension must be a positive integer")

    @classmethod
    def from_name(cls, name: str, support_c: float = 1.0, dimension: int = 1) -> "KernelSpec":
        try:
            family = KERNEL_ALIASES[name.lower()]
        except KeyError:
            raise ConfigError(
                f"unknown kernel {name!r}; expected one of epa2, epa4, uniform"
            ) from None
        return cls(family, support_c, dimension)

    @property
    def short_name(self) -> str:
        return {"epanechnikov2": "epa2", "epanechnikov4": "epa4", "uniform": "uniform"}[self.family]


def _unit_kernel_sq(family: str, u2: np.ndarray) -> np.ndarray:
    """Univariate kernel on [-1, 1] evaluated at squared arguments."""
    if family == "uniform":
        return np.where(u2 <= 1.0, 0.5, 0.0)
    # max(0, 1 - u^2) carries the support indicator for both polynomials
    out = np.maximum(np.subtract(1.0, u2), 0.0)
    if family == "epanechnikov2":
        out *= 0.75
    else:
        # 3 - 10u^2 + 7u^4 = (1 - u^2)(3 - 7u^2)
        out *= np.subtract(3.0, np.multiply(7.0, u2))
        out *= 15.0 / 32.0
    return out


def univariate_sq(spec: KernelSpec, u2) -> np.ndarray:
    """k(u/C)/C as a function of u**2 (vectorized)."""
    c = spec.support_c
    u2 = np.asarray(u2, dtype=float)
    if c == 1.0:
        return _unit_kernel_sq(spec.family, u2)
    return _unit_kernel_sq(spec.family, u2 / (c * c)) / c


def univariate(spec: KernelSpec, u) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    return univariate_sq(spec, u * u)


def kernel_eval(spec: KernelSpec, u) -> float:
    """Product kernel ``prod_j k(u_j / C) / C``; zero outside ``[-C, C]^d``."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if u.shape != (spec.dimension,):
        raise DomainError(f"expected a vector of length {spec.dimension}, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise DomainError("kernel argument must be finite")
    return float(np.prod(univariate(spec, u)))


def product_weights_sq(spec: KernelSpec, sq_diffs: list[np.ndarray], h: float) -> np.ndarray:
    """Kernel weights K(diff / h) from per-dimension squared differences.

    ``sq_diffs[j]`` holds squared coordinate differences for dimension ``j``;
    all arrays share a shape and the result has that shape.
    """
    inv = 1.0 / (h * h)
    w = univariate_sq(spec, sq_diffs[0] * inv)
    for sq in sq_diffs[1:]:
        w = w * univariate_sq(spec, sq * inv)
    return w


def kernel_moment_report(spec: KernelSpec, nodes: int = 64) -> dict:
    """Mass, first and second moment of the univariate kernel.

    Gauss-Legendre on [-C, C]; exact for the polynomial families once
    ``nodes`` exceeds half the polynomial degree.
    """
    x, wts = np.polynomial.legendre.leggauss(nodes)
    c = spec.support_c
    u = c * x
    k = univariate(spec, u)
    wts = wts * c
    return {
        "mass": float(np.sum(wts * k)),
        "m1": float(np.sum(wts * u * k)),
        "m2": float(np.sum(wts * u * u * k)),
    }
