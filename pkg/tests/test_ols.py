# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：test_ols.py
@Description：QR 最小二乘：系数、标准误、拟合优度、秩亏与边界情况
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from regression.ols import (
    INTERCEPT,
    DesignMatrix,
    RankDeficiencyError,
    ols_fit,
    significance_stars,
)


def _random_design(n: int = 200, seed: int = 0) -> DesignMatrix:
    rng = np.random.default_rng(seed)
    return DesignMatrix.from_columns(
        {"x1": rng.normal(size=n), "x2": rng.uniform(-3, 3, size=n), "x3": rng.poisson(2.0, size=n)}
    )


def test_textbook_example():
    design = DesignMatrix.from_columns({"x": [1, 2, 3, 4, 5]})
    result = ols_fit(design, [2, 4, 5, 4, 5])
    assert result.columns == (INTERCEPT, "x")
    np.testing.assert_allclose(result.beta, [2.2, 0.6], atol=1e-12)
    np.testing.assert_allclose(result.se, [math.sqrt(0.88), math.sqrt(0.08)], rtol=1e-10)
    assert result.r_squared == pytest.approx(0.6)
    assert result.adj_r_squared == pytest.approx(1.0 - 0.4 * 4.0 / 3.0)
    assert result.f_stat == pytest.approx(4.5)
    assert result.sigma == pytest.approx(math.sqrt(0.8))
    assert (result.n, result.dof) == (5, 3)
    crit = stats.t.ppf(0.975, 3)
    assert result.conf_low[1] == pytest.approx(0.6 - crit * math.sqrt(0.08))
    assert result.p_values[1] == pytest.approx(2 * stats.t.sf(0.6 / math.sqrt(0.08), 3))


def test_noiseless_recovery():
    design = _random_design()
    beta = np.array([1.5, -2.0, 0.25, 3.0])
    result = ols_fit(design, design.values @ beta)
    np.testing.assert_allclose(result.beta, beta, atol=1e-8)
    assert result.r_squared == pytest.approx(1.0)


def test_matches_normal_equations():
    design = _random_design(seed=3)
    rng = np.random.default_rng(4)
    y = design.values @ np.array([0.5, 1.0, -1.0, 2.0]) + rng.normal(scale=2.0, size=design.n)
    result = ols_fit(design, y)

    x = design.values
    xtx_inv = np.linalg.inv(x.T @ x)
    beta = xtx_inv @ x.T @ y
    resid = y - x @ beta
    s2 = resid @ resid / (design.n - design.p)
    np.testing.assert_allclose(result.beta, beta, rtol=1e-8)
    np.testing.assert_allclose(result.se, np.sqrt(s2 * np.diag(xtx_inv)), rtol=1e-8)
    np.testing.assert_allclose(result.t_stat, result.beta / result.se, rtol=1e-12)


def test_residuals_are_orthogonal_to_columns():
    design = _random_design(seed=5)
    y = np.random.default_rng(6).normal(size=design.n) * 10.0
    result = ols_fit(design, y)
    gram = design.values.T @ result.residuals
    scale = np.linalg.norm(design.values, axis=0) * np.linalg.norm(y)
    assert np.all(np.abs(gram) <= 1e-8 * scale)


@settings(max_examples=50, deadline=None)
@given(factor=st.floats(min_value=1e-3, max_value=1e3), seed=st.integers(0, 1000))
def test_scale_equivariance(factor, seed):
    design = _random_design(n=80, seed=seed)
    y = np.random.default_rng(seed + 1).normal(size=80)
    base = ols_fit(design, y)

    scaled_values = design.values.copy()
    scaled_values[:, 1] *= factor
    scaled = ols_fit(DesignMatrix(design.columns, scaled_values), y)
    assert scaled.beta[1] == pytest.approx(base.beta[1] / factor, rel=1e-7, abs=1e-12)
    assert scaled.se[1] == pytest.approx(base.se[1] / factor, rel=1e-7)
    assert scaled.t_stat[1] == pytest.approx(base.t_stat[1], rel=1e-6, abs=1e-9)
    assert scaled.r_squared == pytest.approx(base.r_squared, rel=1e-9, abs=1e-12)


def test_rank_deficiency_names_dependent_column():
    rng = np.random.default_rng(9)
    x1 = rng.normal(size=50)
    design = DesignMatrix.from_columns({"x1": x1, "x2": 2.0 * x1, "z": rng.normal(size=50)})
    with pytest.raises(RankDeficiencyError) as info:
        ols_fit(design, rng.normal(size=50))
    assert isinstance(info.value, ArithmeticError)
    assert info.value.rank == 3
    assert len(info.value.columns) == 1 and info.value.columns[0] in {"x1", "x2"}


def test_exact_fit_when_n_equals_p():
    design = DesignMatrix.from_columns({"x": [0.0, 1.0]})
    result = ols_fit(design, [1.0, 3.0])
    np.testing.assert_allclose(result.beta, [1.0, 2.0])
    assert result.dof == 0
    assert np.all(np.isnan(result.se))
    assert math.isnan(result.f_stat)
    data = result.to_dict()
    assert data["coefficients"]["x"]["se"] is None
    assert data["coefficients"]["x"]["beta"] == pytest.approx(2.0)


def test_more_columns_than_rows_is_rejected():
    design = DesignMatrix.from_columns({"a": [1.0, 2.0], "b": [0.0, 5.0]})
    with pytest.raises(ValueError):
        ols_fit(design, [1.0, 2.0])


def test_outcome_validation():
    design = _random_design(n=10)
    with pytest.raises(ValueError):
        ols_fit(design, np.ones(9))
    with pytest.raises(ValueError):
        ols_fit(design, np.full(10, np.nan))


def test_no_intercept_uses_uncentred_r_squared():
    x = np.arange(1.0, 11.0)
    y = 3.0 * x + np.random.default_rng(2).normal(size=10)
    result = ols_fit(DesignMatrix(("x",), x.reshape(-1, 1)), y)
    rss = float(result.residuals @ result.residuals)
    assert result.r_squared == pytest.approx(1.0 - rss / float(y @ y))


def test_design_matrix_validation():
    with pytest.raises(ValueError):
        DesignMatrix(("a",), np.ones(3))
    with pytest.raises(ValueError):
        DesignMatrix(("a", "a"), np.ones((3, 2)))
    with pytest.raises(ValueError):
        DesignMatrix(("a",), np.array([[1.0], [np.inf]]))
    with pytest.raises(ValueError):
        DesignMatrix(("a", "b"), np.ones((3, 3)))
    design = DesignMatrix.from_columns({"a": [1.0, 2.0, 3.0]})
    assert design.has_intercept and design.p == 2 and design.n == 3
    np.testing.assert_array_equal(design.column("a"), [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        design.values[0, 0] = 5.0


def test_coefficient_and_covers():
    design = DesignMatrix.from_columns({"x": [1, 2, 3, 4, 5]})
    result = ols_fit(design, [2, 4, 5, 4, 5])
    beta, se = result.coefficient("x")
    assert beta == pytest.approx(0.6) and se == pytest.approx(math.sqrt(0.08))
    assert result.covers("x", 0.6)
    assert not result.covers("x", 10.0)


@pytest.mark.parametrize(
    "p,stars", [(0.001, "***"), (0.0099, "***"), (0.01, "**"), (0.049, "**"), (0.05, "*"), (0.099, "*"), (0.1, ""), (float("nan"), "")]
)
def test_significance_stars(p, stars):
    assert significance_stars(p) == stars
