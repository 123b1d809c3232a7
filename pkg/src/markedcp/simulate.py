"""Data-generating processes, the Monte Carlo driver and population oracles.

Random numbers come from numpy's PCG64 bit generator; replication ``r`` of an
experiment with base seed ``b`` uses ``Generator(PCG64(b + r))``, so any
replication can be regenerated on its own.
"""
from __future__ import annotations

import logging
import math
import os
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, stats

from .errors import ConfigError, EstimationError
from .estimators import EstimatorConfig, estimate_change, lag_embed
from .smoothing import Sample

log = logging.getLogger(__name__)

MODELS = ("iid", "ts", "ar")
SCENARIOS = ("c1", "c2", "c3")
DEFAULT_S0_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
MAX_FAILURE_RATE = 0.05
TS_COEF = 0.4


def scenario_functions(scenario: str) -> tuple[Callable, Callable]:
    """Regression functions before and after the change."""
    if scenario == "c1":
        return (lambda x: -0.5 * np.asarray(x)), (lambda x: 0.5 * np.asarray(x))
    if scenario == "c2":
        return (lambda x: 0.1 * np.asarray(x)), (lambda x: 0.9 * np.asarray(x))
    if scenario == "c3":
        def after(x):
            x = np.asarray(x)
            return (0.5 + 3.0 * np.exp(-0.8 * x * x)) * x
        return (lambda x: 0.5 * np.asarray(x)), after
    raise ConfigError(f"unknown scenario {scenario!r}")


@dataclass(frozen=True)
class SigmaSpec:
    """Conditional standard deviation ``sqrt(1 + a x^2)``.

    ``const1`` is ``a = 0``; ``var_change`` switches from ``a1`` to ``a2``
    after time ``floor(tau * n)``.
    """

    kind: str = "const1"
    a: float = 0.0
    a1: float = 0.0
    a2: float = 0.0
    tau: float = 0.5

    def __post_init__(self):
        if self.kind not in ("const1", "hetero", "var_change"):
            raise ConfigError(f"unknown sigma kind {self.kind!r}")
        if min(self.a, self.a1, self.a2) < 0:
            raise ConfigError("variance coefficients must be non-negative")
        if self.kind == "var_change" and not 0 < self.tau < 1:
            raise ConfigError("tau must lie in (0, 1)")

    @classmethod
    def parse(cls, text: str) -> "SigmaSpec":
        text = text.strip().replace(" ", "")
        if text == "const1":
            return cls()
        m = re.fullmatch(r"hetero\(([^)]+)\)", text)
        if m:
            return cls("hetero", a=float(m.group(1)))
        m = re.fullmatch(r"var_change\(([^,]+),([^,]+),([^)]+)\)", text)
        if m:
            a1, a2, tau = (float(g) for g in m.groups())
            return cls("var_change", a1=a1, a2=a2, tau=tau)
        raise ConfigError(f"cannot parse sigma {text!r}; use const1, hetero(a) or var_change(a1,a2,tau)")

    def label(self) -> str:
        if self.kind == "const1":
            return "const1"
        if self.kind == "hetero":
            return f"hetero({self.a!r})"
        return f"var_change({self.a1!r},{self.a2!r},{self.tau!r})"

    def coefficient(self, t: int, n: int) -> float:
        """Variance slope in effect at (1-based) time ``t``."""
        if self.kind == "const1":
            return 0.0
        if self.kind == "hetero":
            return self.a
        return self.a1 if t <= math.floor(self.tau * n) else self.a2

    def coefficients(self, n: int) -> np.ndarray:
        t = np.arange(1, n + 1)
        if self.kind == "var_change":
            return np.where(t <= math.floor(self.tau * n), self.a1, self.a2)
        return np.full(n, self.coefficient(1, n))


@dataclass(frozen=True)
class DgpConfig:
    model: str = "iid"
    scenario: str = "c1"
    sigma: SigmaSpec = field(default_factory=SigmaSpec)
    n: int = 100
    s0: float = 0.5
    seed: int = 0
    burn_in: int = 200

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if isinstance(self.sigma, str):
            object.__setattr__(self, "sigma", SigmaSpec.parse(self.sigma))
        if int(self.n) != self.n or self.n < 20:
            raise ConfigError("n must be an integer >= 20")
        if not 0 < self.s0 < 1:
            raise ConfigError("s0 must lie in (0, 1)")
        if self.s0 * self.n < 2 or (1 - self.s0) * self.n < 2:
            raise ConfigError("need at least two observations on each side of the change")
        if self.burn_in < 0:
            raise ConfigError("burn_in must be non-negative")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @property
    def k0(self) -> int:
        return math.floor(self.n * self.s0)


@dataclass
class GeneratedSample:
    sample: Sample
    s0: float
    k0: int


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def generate(cfg: DgpConfig) -> GeneratedSample:
    """Draw one sample; the regression function switches after ``floor(n s0)``."""
    m1, m2 = scenario_functions(cfg.scenario)
    n, k0 = cfg.n, cfg.k0
    rng = _rng(cfg.seed)

    if cfg.model in ("iid", "ts"):
        if cfg.model == "iid":
            x = rng.standard_normal(n)
        else:
            eta = rng.standard_normal(cfg.burn_in + n)
            path = np.empty(cfg.burn_in + n)
            prev = 0.0
            for t in range(path.size):
                prev = TS_COEF * prev + eta[t]
                path[t] = prev
            x = path[cfg.burn_in:]
        eps = rng.standard_normal(n)
        t = np.arange(1, n + 1)
        mean = np.where(t <= k0, m1(x), m2(x))
        sd = np.sqrt(1.0 + cfg.sigma.coefficients(n) * x * x)
        return GeneratedSample(Sample(x, mean + sd * eps), cfg.s0, k0)

    # autoregressive: burn-in under the pre-change law, started at 0
    eps = rng.standard_normal(cfg.burn_in + n)
    prev = 0.0
    a_first = cfg.sigma.coefficient(1, n)
    for t in range(cfg.burn_in):
        prev = float(m1(prev)) + math.sqrt(1.0 + a_first * prev * prev) * eps[t]
    series = np.empty(n + 1)
    series[0] = prev
    coef = cfg.sigma.coefficients(n)
    for t in range(1, n + 1):
        m = m1 if t <= k0 else m2
        series[t] = float(m(prev)) + math.sqrt(1.0 + coef[t - 1] * prev * prev) * eps[cfg.burn_in + t - 1]
        prev = series[t]
    return GeneratedSample(lag_embed(series), cfg.s0, k0)


@dataclass
class McResult:
    dgp: DgpConfig
    estimator: EstimatorConfig
    replications: int
    estimates: np.ndarray
    failures: int = 0

    @property
    def mse(self) -> float:
        return float(np.mean((self.estimates - self.dgp.s0) ** 2))

    @property
    def bias(self) -> float:
        return float(np.mean(self.estimates - self.dgp.s0))


def _one_replication(args) -> Optional[float]:
    dgp, est = args
    try:
        return estimate_change(generate(dgp).sample, est).s_hat
    except (EstimationError, ConfigError) as exc:
        log.debug("replication with seed %d failed: %s", dgp.seed, exc)
        return None


def worker_count(workers: Optional[int] = None) -> int:
    if workers is None:
        workers = int(os.environ.get("CPKERNEL_THREADS", "1") or 1)
    return max(1, int(workers))


def monte_carlo(dgp: DgpConfig, est: EstimatorConfig, reps: int,
                s0_grid: Optional[Sequence[float]] = DEFAULT_S0_GRID,
                workers: Optional[int] = None) -> list[McResult]:
    """Run ``reps`` replications for each ``s0`` in ``s0_grid``.

    Replication ``r`` uses seed ``dgp.seed + r`` (the same seeds for every
    ``s0``). Failed replications are dropped and counted; more than 5 %
    failures for one ``s0`` raises :class:`EstimationError`. Results do not
    depend on ``workers``.
    """
    if reps < 1:
        raise ConfigError("reps must be at least 1")
    grid = [dgp.s0] if s0_grid is None else list(s0_grid)
    tasks = []
    for s0 in grid:
        base = replace(dgp, s0=float(s0))
        tasks.extend((replace(base, seed=dgp.seed + r), est) for r in range(reps))

    nw = worker_count(workers)
    if nw > 1:
        with ProcessPoolExecutor(max_workers=nw) as pool:
            outcomes = list(pool.map(_one_replication, tasks, chunksize=max(1, len(tasks) // (4 * nw))))
    else:
        outcomes = [_one_replication(t) for t in tasks]

    results = []
    for i, s0 in enumerate(grid):
        chunk = outcomes[i * reps:(i + 1) * reps]
        ok = np.array([v for v in chunk if v is not None], dtype=float)
        failures = reps - ok.size
        if failures > MAX_FAILURE_RATE * reps:
            raise EstimationError(
                f"{failures} of {reps} replications failed at s0={s0}; aborting"
            )
        results.append(McResult(replace(dgp, s0=float(s0)), est, reps, ok, failures))
    return results


def pooled_oracle_mbar(scenario: str, s0: float, x) -> np.ndarray:
    """Limit of the full-sample smoother under a stationary covariate law."""
    m1, m2 = scenario_functions(scenario)
    return s0 * m1(x) + (1.0 - s0) * m2(x)


def drift_time(s0: float, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    return np.where(s <= s0, (1.0 - s0) * s, (1.0 - s) * s0)


def drift_mark(scenario: str, z: float) -> float:
    """Integral of ``(m1 - m2) * phi`` over ``(-inf, z]``, phi standard normal."""
    m1, m2 = scenario_functions(scenario)
    val, _ = integrate.quad(lambda x: (m1(x) - m2(x)) * stats.norm.pdf(x), -np.inf, z,
                            epsabs=1e-13, epsrel=1e-12, limit=200)
    return float(val)


def population_drift(scenario: str, s0: float, s: float, z: float) -> float:
    """Deterministic limit of the marked residual process at ``(s, z)``."""
    return float(drift_time(s0, s)) * drift_mark(scenario, z)
