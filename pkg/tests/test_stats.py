import math

import numpy as np
import pytest

from exactur.exceptions import SeriesTooShort, TauUndefined
from exactur.series import Series
from exactur.stats import (
    Kind,
    Statistic,
    batch_statistic,
    batch_stats,
    sigma2_mean_corrected,
    sigma2_zero_mean,
    unit_root_stats,
)


def _walk(seed, n=100):
    return Series(np.random.default_rng(seed).standard_normal(n).cumsum())


def test_sigma2_zero_mean_examples():
    assert sigma2_zero_mean(Series([1, 1, 1]), 1.0) == 0
    assert sigma2_zero_mean(Series([0, 1, 0]), 0.0) == 1
    with pytest.raises(SeriesTooShort):
        sigma2_zero_mean(Series([1, 2]), 0.0)


def test_sigma2_mean_corrected_examples():
    assert sigma2_mean_corrected(Series([4, 4, 4, 4]), 0.3) == 0
    assert sigma2_mean_corrected(Series([0, 2, 0, 2]), 0.0) == 3
    with pytest.raises(SeriesTooShort):
        sigma2_mean_corrected(Series([1, 2, 3]), 0.0)


def test_zero_mean_with_zero_cross_product():
    out = unit_root_stats(Series([1, 0, 2, 0, 1]), Kind.ZERO_MEAN)
    assert out.rho_hat == 0
    assert out.delta == -5


def test_unit_estimate_only_for_constant_series():
    # the score cubic vanishes at 1 only when every first difference is 0,
    # so a unit estimate always comes with zero residual variance
    out = batch_stats(np.full((1, 6), 5.0), Kind.ZERO_MEAN)
    assert out["rho"][0] == pytest.approx(1.0, abs=1e-12)
    assert out["delta"][0] == pytest.approx(0.0, abs=1e-10)
    assert out["boundary"][0]
    assert np.isnan(out["tau"][0])
    with pytest.raises(TauUndefined):
        unit_root_stats(Series([5.0] * 6), Kind.ZERO_MEAN)


def test_tau_delta_identity():
    for kind in Kind:
        s = _walk(3)
        out = unit_root_stats(s, kind)
        z = s.values - (s.values.mean() if kind is Kind.MEAN_CORRECTED else 0)
        lagged = math.fsum(z[:-1] ** 2)
        expect = out.delta * math.sqrt(lagged) / (out.n * math.sqrt(out.sigma2_hat))
        assert out.tau == pytest.approx(expect, rel=1e-12)
        assert np.sign(out.tau) == np.sign(out.delta)


def test_negative_under_null():
    z = np.random.default_rng(11).standard_normal((1000, 100)).cumsum(axis=1)
    out = batch_stats(z, Kind.MEAN_CORRECTED)
    n_neg = np.count_nonzero((out["delta"] < 0) & (out["tau"] < 0))
    assert n_neg >= 990


def test_location_and_scale_invariance():
    s = _walk(4)
    base = unit_root_stats(s, Kind.MEAN_CORRECTED)
    shifted = unit_root_stats(Series(s.values + 123.25), Kind.MEAN_CORRECTED)
    scaled = unit_root_stats(Series(s.values * 7.5), Kind.MEAN_CORRECTED)
    for other in (shifted, scaled):
        assert other.rho_hat == pytest.approx(base.rho_hat, abs=1e-12)
        assert other.delta == pytest.approx(base.delta, abs=1e-10)
        assert other.tau == pytest.approx(base.tau, abs=1e-10)
    zm = unit_root_stats(Series(s.values * 0.01), Kind.ZERO_MEAN)
    assert zm.tau == pytest.approx(unit_root_stats(s, Kind.ZERO_MEAN).tau, rel=1e-12)


def test_batch_matches_scalar():
    z = np.random.default_rng(6).standard_normal((20, 60)).cumsum(axis=1)
    for stat in Statistic:
        vals = batch_statistic(z, stat)
        for i in range(20):
            out = unit_root_stats(Series(z[i]), stat.kind)
            assert vals[i] == pytest.approx(out.tau if stat.pivotal else out.delta, rel=1e-10)


def test_statistic_enum():
    assert Statistic("taumu").kind is Kind.MEAN_CORRECTED
    assert Statistic.TAU.pivotal and not Statistic.DELTA_MU.pivotal
