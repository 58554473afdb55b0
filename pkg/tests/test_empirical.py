# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：test_empirical.py
@Description：经验分布：KS 距离、矩、直方图与极端质量
"""

import numpy as np
import pytest
from scipy import stats

from limit_analysis.beta import BetaParams, beta_cdf
from limit_analysis.empirical import (
    EmpiricalDistribution,
    extreme_fractions,
    histogram,
    ks_statistic,
    ks_two_sample,
    sample_moments,
    uniform_cdf,
)


@pytest.fixture
def samples() -> np.ndarray:
    return np.random.default_rng(2024).beta(2.0, 3.0, size=500)


def test_from_samples_sorts_and_freezes(samples):
    dist = EmpiricalDistribution.from_samples(samples)
    assert dist.count == 500
    assert np.all(np.diff(dist.samples) >= 0)
    with pytest.raises(ValueError):
        dist.samples[0] = 0.3


@pytest.mark.parametrize("bad", [[0.2, 1.1], [-0.1], [0.5, float("nan")]])
def test_from_samples_rejects_out_of_range(bad):
    with pytest.raises(ValueError):
        EmpiricalDistribution.from_samples(bad)


def test_ks_matches_scipy_one_sample(samples):
    dist = EmpiricalDistribution.from_samples(samples)
    params = BetaParams(2.0, 3.0)
    ours = ks_statistic(dist, lambda x: beta_cdf(params, x))
    reference = stats.kstest(samples, stats.beta(2.0, 3.0).cdf).statistic
    assert ours == pytest.approx(reference, abs=1e-10)


def test_ks_uniform_single_sample():
    dist = EmpiricalDistribution.from_samples([0.3])
    assert ks_statistic(dist, uniform_cdf) == pytest.approx(0.7)


def test_ks_two_sample_matches_scipy(samples):
    other = np.random.default_rng(7).beta(2.5, 3.0, size=321)
    ours = ks_two_sample(EmpiricalDistribution.from_samples(samples), EmpiricalDistribution.from_samples(other))
    assert ours == pytest.approx(stats.ks_2samp(samples, other).statistic, abs=1e-12)


def test_sample_moments(samples):
    mean, var = sample_moments(EmpiricalDistribution.from_samples(samples))
    assert mean == pytest.approx(np.mean(samples))
    assert var == pytest.approx(np.var(samples, ddof=1))
    with pytest.raises(ValueError):
        sample_moments(EmpiricalDistribution.from_samples([0.4]))


def test_histogram_masses_sum_to_one(samples):
    edges, masses = histogram(EmpiricalDistribution.from_samples(samples), 20)
    assert len(edges) == 21 and len(masses) == 20
    assert edges[0] == 0.0 and edges[-1] == 1.0
    assert sum(masses) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        histogram(EmpiricalDistribution.from_samples(samples), 0)


def test_extreme_fractions_are_strict():
    dist = EmpiricalDistribution.from_samples([0.0, 0.05, 0.2, 0.95, 0.96, 1.0])
    lower, upper = extreme_fractions(dist, 0.05)
    assert lower == pytest.approx(1 / 6)
    assert upper == pytest.approx(2 / 6)
    with pytest.raises(ValueError):
        extreme_fractions(dist, 0.5)


def test_empty_distribution_is_rejected():
    empty = EmpiricalDistribution.from_samples([])
    with pytest.raises(ValueError):
        ks_statistic(empty, uniform_cdf)
    with pytest.raises(ValueError):
        extreme_fractions(empty, 0.1)
