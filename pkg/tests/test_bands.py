# -*- coding: utf-8 -*-
"""Tests for critical bandwidths and the cross-validation likelihood profile."""
import math

import numpy as np
import pytest

from circmode.bands import (
    critical_bandwidth,
    golden_section_max,
    likelihood_profile,
    log_cv_pseudo_likelihood,
    profile_curve,
)
from circmode.circdist import TWO_PI, AngleSample, wn_density
from circmode.config import DEFAULT_TUNING
from circmode.errors import DegenerateDensityError, InsufficientSampleError, InvalidParameterError, TieError
from circmode.kde import KdeSpec, count_modes, kde_curve


def _dense_mode_count(sample, h, grid_size=100_000):
    _, values = kde_curve(KdeSpec(sample, h), grid_size)
    return int(np.sum((values > np.roll(values, 1)) & (values > np.roll(values, -1))))


def test_cv_likelihood_uniform_limit(make_sample):
    """Test that a huge bandwidth gives the uniform log-likelihood."""
    sample = make_sample(1, 50)
    assert log_cv_pseudo_likelihood(sample, 1e3) == pytest.approx(-50 * math.log(TWO_PI), abs=1e-9)


def test_cv_likelihood_collapses_for_tiny_bandwidth(make_sample):
    """Test that leave-one-out densities vanish as h → 0."""
    assert log_cv_pseudo_likelihood(make_sample(2, 50), 1e-6) < -1e4


def test_cv_likelihood_two_points():
    """Test ℓ_CV for two observations against the kernel between them."""
    a, b = 0.7, 2.9
    sample = AngleSample.from_values([a, b])
    for h in (0.3, 0.8):
        expected = 2.0 * math.log(wn_density(a - b, 0.0, h * h))
        assert log_cv_pseudo_likelihood(sample, h) == pytest.approx(expected, rel=1e-9)


def test_cv_likelihood_guards():
    """Test rejection of ties, single observations and bad bandwidths."""
    with pytest.raises(TieError):
        log_cv_pseudo_likelihood(AngleSample.from_values([1.0, 1.0, 2.0]), 0.3)
    with pytest.raises(InsufficientSampleError):
        log_cv_pseudo_likelihood(AngleSample.from_values([1.0]), 0.3)
    with pytest.raises(InvalidParameterError):
        log_cv_pseudo_likelihood(AngleSample.from_values([1.0, 2.0]), 0.0)


def test_profile_curve_matches_pointwise_values(make_sample):
    """Test that the vectorized profile agrees with single evaluations."""
    sample = make_sample(3, 20, spread=0.5)
    grid = [0.1, 0.4, 1.2]
    np.testing.assert_allclose(profile_curve(sample, grid), [log_cv_pseudo_likelihood(sample, h) for h in grid])


def test_golden_section_finds_parabola_peak():
    """Test golden-section search on a concave parabola."""
    x, value = golden_section_max(lambda t: -((t - 2.0) ** 2), 1.0, 5.0, 1e-7)
    assert x == pytest.approx(2.0, abs=1e-5)
    assert value == pytest.approx(0.0, abs=1e-9)


def test_single_observation_hits_the_floor():
    """Test that one observation is unimodal at every bandwidth."""
    result = critical_bandwidth(AngleSample.from_values([1.0]), 1)
    assert result.floor_hit
    assert result.h_k == DEFAULT_TUNING.h_floor
    assert result.modes_below is None


def test_two_points_with_two_modes_allowed_hit_the_floor():
    """Test the floor case for two observations and k = 2."""
    result = critical_bandwidth(AngleSample.from_values([math.pi / 2, 3 * math.pi / 2]), 2)
    assert result.floor_hit
    assert result.modes_at_hk == 2


def test_antipodal_pair_cannot_be_made_unimodal():
    """Test that a perfectly symmetric pair stays bimodal up to h_ceil."""
    with pytest.raises(DegenerateDensityError):
        critical_bandwidth(AngleSample.from_values([math.pi / 2, 3 * math.pi / 2]), 1)


def test_critical_bandwidth_validates_k():
    """Test that k must be positive."""
    with pytest.raises(InvalidParameterError):
        critical_bandwidth(AngleSample.from_values([1.0, 2.0]), 0)


def test_two_point_merge_matches_dense_grid():
    """Test h_1 of an asymmetric pair against a dense-grid bisection."""
    sample = AngleSample.from_values([math.pi / 2, math.pi / 2 + 2.5])
    result = critical_bandwidth(sample, 1)
    lo, hi = 0.5, 3.0
    assert _dense_mode_count(sample, lo) == 2
    assert _dense_mode_count(sample, hi) == 1
    while hi / lo > 1.0 + 1e-5:
        mid = math.sqrt(lo * hi)
        if _dense_mode_count(sample, mid) <= 1:
            hi = mid
        else:
            lo = mid
    assert result.h_k == pytest.approx(hi, rel=1e-3)
    assert not result.floor_hit
    assert result.modes_at_hk <= 1 < result.modes_below


def test_critical_bandwidth_splits_the_bandwidth_axis(make_sample):
    """Test mode counts on either side of h_k."""
    sample = make_sample(31, 40, spread=0.3)
    result = critical_bandwidth(sample, 1)
    assert result.modes_at_hk <= 1
    assert result.modes_below > 1
    for factor in (1.01, 2.0, 4.0):
        assert count_modes(KdeSpec(sample, result.h_k * factor), locate=False).count <= 1
    for factor in (0.99, 0.5):
        assert count_modes(KdeSpec(sample, result.h_k * factor), locate=False).count > 1


def test_critical_bandwidth_decreases_with_k(make_sample):
    """Test h_1 >= h_2 >= h_3."""
    sample = make_sample(32, 30, spread=0.5)
    h1, h2, h3 = (critical_bandwidth(sample, k).h_k for k in (1, 2, 3))
    tol = 1.0 - 2.0 * DEFAULT_TUNING.bracket_tol_rel
    assert h1 >= h2 * tol
    assert h2 >= h3 * tol


def test_profile_at_the_ceiling_is_uniform(make_sample):
    """Test the profile grid value at h_ceil."""
    sample = make_sample(33, 30, spread=0.5)
    profile = likelihood_profile(sample, 0.3)
    h_last, value_last = profile.grid[-1]
    assert h_last == pytest.approx(DEFAULT_TUNING.h_ceil)
    assert value_last == pytest.approx(-30 * math.log(TWO_PI), abs=1e-4)
    assert any(h == 0.3 for h, _ in profile.grid)


def test_profile_maximum_matches_dense_grid(make_sample):
    """Test h_max against the argmax of ℓ_CV over a dense log grid."""
    sample = make_sample(34, 40, spread=0.4)
    profile = likelihood_profile(sample, DEFAULT_TUNING.h_floor)
    dense = np.geomspace(DEFAULT_TUNING.h_floor, DEFAULT_TUNING.h_ceil, 10_000)
    values = profile_curve(sample, dense)
    best = int(np.argmax(values))
    assert profile.h_max == pytest.approx(dense[best], rel=1e-2)
    assert profile.l_max >= values[best] - 1e-6


def test_unconstrained_maximizer_above_h_k_is_kept(make_sample):
    """Test h_H0 = h_max whenever the unconstrained maximizer already satisfies the constraint."""
    profile = likelihood_profile(make_sample(35, 30, spread=0.4), 1e-3)
    assert profile.h_max >= 1e-3
    assert profile.h_H0 == profile.h_max
    assert profile.l_H0 == profile.l_max


def test_constrained_maximum_never_exceeds_unconstrained(make_sample):
    """Test ℓ_max >= ℓ_H0 and h_H0 >= h_k for a large constraint."""
    profile = likelihood_profile(make_sample(36, 30, spread=0.3), 2.0)
    assert profile.h_H0 >= 2.0
    assert profile.l_max >= profile.l_H0


def test_profile_rejects_constraint_above_ceiling(make_sample):
    """Test that h_k beyond h_ceil leaves no admissible bandwidth."""
    with pytest.raises(InvalidParameterError):
        likelihood_profile(make_sample(37, 10), 20.0)
