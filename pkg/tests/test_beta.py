# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：test_beta.py
@Description：Beta 极限律：不完全 Beta 函数、密度与矩
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from limit_analysis.beta import (
    BetaParams,
    beta_cdf,
    beta_density_curve,
    beta_moments,
    beta_pdf,
    limit_beta_params,
)
from process_core.urn import UrnParams


def test_limit_params_from_urn():
    params = limit_beta_params(UrnParams(b0=1.0, r0=1.0, k=0.1))
    assert (params.a, params.b) == pytest.approx((10.0, 10.0))
    assert limit_beta_params(UrnParams()) == BetaParams(1.0, 1.0)


def test_uniform_limit_is_identity():
    params = BetaParams(1.0, 1.0)
    for x in np.linspace(0.0, 1.0, 21):
        assert beta_cdf(params, float(x)) == pytest.approx(float(x), abs=1e-12)


@pytest.mark.parametrize(
    "a,b",
    [(0.1, 0.1), (0.5, 2.0), (1.0, 1.0), (2.0, 5.0), (10.0, 10.0), (50.0, 3.0), (300.0, 700.0)],
)
def test_cdf_matches_scipy(a, b):
    params = BetaParams(a, b)
    for x in [1e-6, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 1 - 1e-6]:
        assert beta_cdf(params, x) == pytest.approx(float(special.betainc(a, b, x)), abs=1e-10)


@settings(max_examples=200, deadline=None)
@given(
    a=st.floats(min_value=0.05, max_value=200.0),
    b=st.floats(min_value=0.05, max_value=200.0),
    x=st.floats(min_value=0.0, max_value=1.0),
)
def test_cdf_property_against_scipy(a, b, x):
    value = beta_cdf(BetaParams(a, b), x)
    assert 0.0 <= value <= 1.0
    assert value == pytest.approx(float(special.betainc(a, b, x)), abs=1e-9)


def test_cdf_symmetry():
    params, mirrored = BetaParams(2.5, 7.0), BetaParams(7.0, 2.5)
    for x in [0.05, 0.3, 0.6, 0.95]:
        assert beta_cdf(params, x) == pytest.approx(1.0 - beta_cdf(mirrored, 1.0 - x), abs=1e-12)


def test_cdf_endpoints_and_domain():
    params = BetaParams(3.0, 4.0)
    assert beta_cdf(params, 0.0) == 0.0
    assert beta_cdf(params, 1.0) == 1.0
    with pytest.raises(ValueError):
        beta_cdf(params, 1.5)
    with pytest.raises(ValueError):
        BetaParams(0.0, 1.0)


def test_pdf_matches_scipy_and_endpoint_behaviour():
    params = BetaParams(2.0, 3.0)
    for x in [0.1, 0.4, 0.8]:
        assert beta_pdf(params, x) == pytest.approx(float(stats.beta.pdf(x, 2.0, 3.0)), rel=1e-10)
    assert beta_pdf(params, 0.0) == 0.0
    assert beta_pdf(BetaParams(0.5, 0.5), 0.0) == math.inf
    assert beta_pdf(BetaParams(1.0, 1.0), 1.0) == pytest.approx(1.0)


def test_density_curve_avoids_endpoints():
    curve = beta_density_curve(BetaParams(0.1, 0.1), points=10)
    assert len(curve) == 10
    assert all(0.0 < x < 1.0 and math.isfinite(f) for x, f in curve)
    with pytest.raises(ValueError):
        beta_density_curve(BetaParams(1.0, 1.0), points=1)


def test_moments():
    mean, var = beta_moments(BetaParams(10.0, 10.0))
    assert mean == pytest.approx(0.5)
    assert var == pytest.approx(0.25 / 21.0)
    mean, var = beta_moments(BetaParams(2.0, 6.0))
    ref_mean, ref_var = stats.beta.stats(2.0, 6.0, moments="mv")
    assert mean == pytest.approx(float(ref_mean))
    assert var == pytest.approx(float(ref_var))
