import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from markedcp.errors import ConfigError, EstimationError
from markedcp.estimators import (
    EstimatorConfig,
    argmax_min_index,
    estimate_change,
    estimate_from_profile,
    estimate_from_residuals,
    fit_residuals,
    ks_statistic,
    lag_embed,
)
from markedcp.kernels import KernelSpec
from markedcp.mep import CusumProfile, compute_profile, ks_profile_naive, marked_residuals
from markedcp.smoothing import Sample

EPA2 = KernelSpec("epanechnikov2")


def test_flat_profile_gives_zero():
    rng = np.random.default_rng(0)
    s = Sample(rng.normal(size=30), np.full(30, 2.0))
    est = estimate_change(s, EstimatorConfig(bandwidth=0.8, trim="none"))
    assert np.all(est.profile.ks == 0)
    assert est.k_hat == 0 and est.s_hat == 0.0
    est = estimate_change(s, EstimatorConfig(trim="auto"))
    assert est.k_hat == 0


def test_small_sample_rejected():
    s = Sample(np.arange(9.0), np.arange(9.0))
    with pytest.raises(EstimationError):
        estimate_change(s)


@pytest.mark.parametrize("variant", ["ks", "cvm"])
def test_hand_case_via_residual_seam(variant):
    mr = marked_residuals([1.0, -2.0, 1.0, 1.0], [0.2, -1.0, 0.5, 0.1])
    pts = [(0.2,), (-1.0,), (0.5,), (0.1,)]
    ref = oracles.ks_profile(pts, [1, -2, 1, 1]) if variant == "ks" else oracles.cvm_profile(pts, [1, -2, 1, 1])
    expected_k = min(k for k, v in enumerate(ref) if v == max(ref))
    est = estimate_from_residuals(mr, variant)
    assert est.k_hat == expected_k == 2
    assert est.s_hat == 0.5


def test_min_s_tie_rule():
    prof = CusumProfile(np.array([0, 1.0, 3.0, 2.0, 3.0, 0.5]), np.zeros(6), "observed_points")
    assert estimate_from_profile(prof, "ks").k_hat == 2
    # near-equal maxima inside the relative tolerance also go to the smaller index
    prof = CusumProfile(np.array([0, 3.0 * (1 - 1e-14), 3.0]), np.zeros(3), "observed_points")
    assert argmax_min_index(prof.ks, 1e-12) == 1
    assert argmax_min_index(prof.ks, 0.0) == 2


def test_estimate_invariants_and_labels():
    rng = np.random.default_rng(1)
    n = 60
    x = rng.normal(size=n)
    y = np.where(np.arange(n) < 30, -x, x) + 0.1 * rng.normal(size=n)
    labels = [str(1950 + i) for i in range(n)]
    est = estimate_change(Sample(x, y, labels), EstimatorConfig(bandwidth=0.8))
    assert est.s_hat == est.k_hat / n
    assert math.floor(n * est.s_hat) == est.k_hat
    assert est.stat_max == est.profile.ks[est.k_hat]
    assert est.time_label == labels[est.k_hat]
    assert not np.any(est.profile.ks[:est.k_hat] >= est.stat_max * (1 - 1e-12))


def test_piecewise_constant_signal():
    hits = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = 200
        x = rng.normal(size=n)
        y = np.where(np.arange(1, n + 1) <= n // 2, 0.0, 10.0)
        est = estimate_change(Sample(x, y), EstimatorConfig(kernel=EPA2, bandwidth="cv"))
        hits += abs(est.s_hat - 0.5) <= 0.05
    assert hits >= 95


@given(st.integers(0, 10_000), st.floats(0.1, 50))
def test_argmax_invariant_under_response_scaling(seed, lam):
    rng = np.random.default_rng(seed)
    n = 40
    x = rng.normal(size=n)
    y = np.where(np.arange(n) < 20, 0.5 * x, -0.5 * x) + rng.normal(size=n)
    for variant in ("ks", "cvm"):
        cfg = EstimatorConfig(variant=variant, bandwidth=1.0, trim="none")
        a = estimate_change(Sample(x, y), cfg)
        b = estimate_change(Sample(x, lam * y), cfg)
        assert a.k_hat == b.k_hat


def test_config_validation():
    with pytest.raises(ConfigError):
        EstimatorConfig(variant="ad")
    with pytest.raises(ConfigError):
        EstimatorConfig(bandwidth=-1.0)
    with pytest.raises(ConfigError):
        EstimatorConfig(bandwidth="silverman")
    with pytest.raises(ConfigError):
        EstimatorConfig(tie_tol=1e-3)
    with pytest.raises(ConfigError):
        EstimatorConfig(trim="sometimes")
    with pytest.raises(ConfigError):
        EstimatorConfig(trim=-2.0)


def test_fixed_trim_value_is_box_around_origin():
    rng = np.random.default_rng(2)
    x = rng.normal(size=50)
    s = Sample(x, x + rng.normal(size=50))
    mr, h = fit_residuals(s, EstimatorConfig(bandwidth=0.9, trim=1.0))
    assert h == 0.9
    assert np.array_equal(mr.weight > 0, np.abs(x) <= 1.0)


def test_two_dimensional_sample():
    rng = np.random.default_rng(3)
    n = 40
    x = rng.normal(size=(n, 2))
    y = np.where(np.arange(n) < 20, x[:, 0], -x[:, 0]) + 0.2 * rng.normal(size=n)
    est = estimate_change(Sample(x, y), EstimatorConfig(bandwidth=1.5, trim="none"))
    assert est.profile.eval_mode == "lattice"
    assert 0 <= est.k_hat <= n


# --- lag embedding -----------------------------------------------------------

def test_lag_embed_small():
    s = lag_embed([1.0, 2.0, 3.0], min_length=3)
    assert list(s.x[:, 0]) == [1.0, 2.0] and list(s.y) == [2.0, 3.0]


def test_lag_embed_constant_and_labels():
    s = lag_embed(np.full(12, 4.0), labels=list(range(12)))
    assert np.all(s.x == 4.0) and np.all(s.y == 4.0)
    assert s.time_labels == tuple(range(1, 12))


def test_lag_embed_too_short():
    with pytest.raises(ConfigError):
        lag_embed(np.arange(10.0))


# --- scaled statistic --------------------------------------------------------

def test_ks_statistic():
    zero = CusumProfile(np.zeros(5), np.zeros(5), "observed_points")
    assert ks_statistic(zero, 4) == 0.0
    prof = CusumProfile(np.array([0, 0.25, 0.5, 0.5, 0.5]), np.zeros(5), "observed_points")
    assert ks_statistic(prof, 4) == 1.0


def test_ks_statistic_matches_naive():
    rng = np.random.default_rng(4)
    for _ in range(20):
        n = int(rng.integers(2, 50))
        mr = marked_residuals(rng.normal(size=n), rng.normal(size=n))
        prof = compute_profile(mr)
        assert ks_statistic(prof, n) == pytest.approx(math.sqrt(n) * ks_profile_naive(mr).max(), abs=1e-12)
