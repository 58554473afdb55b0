# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：test_disparity.py
@Description：组间差距、极端质量与直方图
"""

import json

import numpy as np
import pytest

from cohort.disparity import disparity_metrics, extreme_mass, gap_within_tolerance
from cohort.engine import CohortSpec, GroupSpec, run_cohort
from process_core.bias import BiasSpec
from process_core.urn import UrnParams


@pytest.fixture(scope="module")
def two_groups():
    spec = CohortSpec(
        groups=(
            GroupSpec("high", 400, urn=UrnParams(b0=3.0, r0=2.0)),
            GroupSpec("low", 300, urn=UrnParams(b0=2.0, r0=3.0)),
            GroupSpec("pushed", 200, urn=UrnParams(), bias=BiasSpec(rho=0.05, group_indicator=1)),
        ),
        n_steps=60,
        master_seed=5,
        grid_points=6,
    )
    return run_cohort(spec)


def test_report_shapes(two_groups):
    report = disparity_metrics(two_groups, epsilon=0.1, bins=10)
    assert report.checkpoints == [int(c) for c in two_groups.checkpoints]
    assert set(report.gaps) == {"high-low", "high-pushed", "low-pushed"}
    for values in report.group_means.values():
        assert len(values) == len(report.checkpoints)
    assert all(len(h["masses"]) == 10 for h in report.histograms.values())


def test_gap_at_first_checkpoint_is_initial_difference(two_groups):
    report = disparity_metrics(two_groups)
    assert report.gaps["high-low"][0] == pytest.approx(0.2, abs=1e-12)
    assert report.gap_se["high-low"][0] == 0.0
    assert gap_within_tolerance(report, "high-low", 0.2)[0]


def test_means_and_se_match_numpy(two_groups):
    report = disparity_metrics(two_groups)
    g = two_groups.group("low")
    np.testing.assert_allclose(report.group_means["low"], g.checkpoint_p.mean(axis=0))
    np.testing.assert_allclose(
        report.group_se["low"], g.checkpoint_p.std(axis=0, ddof=1) / np.sqrt(300)
    )


def test_extreme_mass_matches_direct_count(two_groups):
    masses = extreme_mass(two_groups, 0.1)
    ends = two_groups.group("high").endpoints
    assert masses["high"].lower == pytest.approx(np.mean(ends < 0.1))
    assert masses["high"].upper == pytest.approx(np.mean(ends > 0.9))
    assert masses["high"].total == pytest.approx(masses["high"].lower + masses["high"].upper)


def test_report_is_json_serialisable(two_groups):
    data = disparity_metrics(two_groups).to_dict()
    text = json.dumps(data)
    assert json.loads(text)["extreme"]["low"]["total"] == pytest.approx(data["extreme"]["low"]["total"])


def test_validation(two_groups):
    with pytest.raises(ValueError):
        disparity_metrics(two_groups, epsilon=0.5)
    with pytest.raises(ValueError):
        disparity_metrics(two_groups, bins=0)
    with pytest.raises(ValueError):
        extreme_mass(two_groups, 0.0)
    with pytest.raises(KeyError):
        gap_within_tolerance(disparity_metrics(two_groups), "low-high", 0.2)
