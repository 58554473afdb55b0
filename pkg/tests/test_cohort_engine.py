# -*- coding: utf-8 -*-
"""
@Project ：rdl_reinforced_decision_lab
@File    ：test_cohort_engine.py
@Description：cohort 引擎：与单轨迹模拟逐位一致、线程数 / 分块无关、检查点
"""

import numpy as np
import pytest

from cohort.disparity import extreme_mass
from cohort.engine import (
    CohortSpec,
    GroupSpec,
    checkpoint_grid,
    group_seed_derivations,
    run_cohort,
)
from limit_analysis.empirical import EmpiricalDistribution, ks_two_sample
from process_core.bias import BiasSpec, ClampPolicy
from process_core.rng import derive_seed
from process_core.trajectory import TrajectoryParams, simulate_trajectory
from process_core.urn import UrnParams

GROUPS = (
    GroupSpec(name="plain", size=9, urn=UrnParams(b0=1.0, r0=1.0, k=1.0)),
    GroupSpec(name="slow", size=7, urn=UrnParams(b0=2.0, r0=1.0, k=0.1)),
    GroupSpec(name="biased", size=8, urn=UrnParams(), bias=BiasSpec(rho=0.05, group_indicator=1)),
    GroupSpec(
        name="unclamped",
        size=6,
        urn=UrnParams(),
        bias=BiasSpec(rho=0.22, group_indicator=0, clamp_policy=ClampPolicy.UNCLAMPED),
    ),
)


def _spec(**kwargs) -> CohortSpec:
    base = dict(groups=GROUPS, n_steps=40, master_seed=31337, record_full_paths=True)
    base.update(kwargs)
    return CohortSpec(**base)


def test_matches_scalar_simulation_bit_for_bit():
    result = run_cohort(_spec())
    for g_idx, group in enumerate(GROUPS):
        g = result.group(group.name)
        for j in range(group.size):
            seed = derive_seed(31337, g_idx, j)
            assert int(g.seeds[j]) == seed
            traj = simulate_trajectory(
                TrajectoryParams(urn=group.urn, bias=group.bias, n_steps=40, seed=seed)
            )
            assert tuple(g.paths[j].tolist()) == traj.probabilities
            assert tuple(int(x) for x in g.outcomes[j]) == traj.outcomes
            assert g.endpoints[j] == traj.endpoint
            assert g.successes[j] == traj.successes


def test_rebuilt_trajectories_equal_scalar_trajectories():
    result = run_cohort(_spec())
    for g_idx, group in enumerate(GROUPS):
        for j, rebuilt in enumerate(result.trajectories(group.name)):
            seed = derive_seed(31337, g_idx, j)
            assert rebuilt == simulate_trajectory(
                TrajectoryParams(urn=group.urn, bias=group.bias, n_steps=40, seed=seed)
            )
    assert {t.out_of_regime_steps for t in result.trajectories("unclamped")} == {37}
    assert {t.out_of_regime_steps for t in result.trajectories("biased")} == {0}


def test_output_independent_of_threads_and_chunks():
    reference = run_cohort(_spec(), threads=1, chunk_size=1000)
    for threads, chunk in [(4, 3), (2, 1), (8, 5)]:
        other = run_cohort(_spec(), threads=threads, chunk_size=chunk)
        for a, b in zip(reference.groups, other.groups):
            np.testing.assert_array_equal(a.paths, b.paths)
            np.testing.assert_array_equal(a.outcomes, b.outcomes)
            np.testing.assert_array_equal(a.checkpoint_p, b.checkpoint_p)
            np.testing.assert_array_equal(a.seeds, b.seeds)


def test_adding_a_group_does_not_change_earlier_groups():
    small = run_cohort(_spec(groups=GROUPS[:2]))
    full = run_cohort(_spec())
    for name in ("plain", "slow"):
        np.testing.assert_array_equal(small.group(name).paths, full.group(name).paths)


def test_checkpoints_include_first_and_last_step():
    result = run_cohort(_spec(record_full_paths=False, grid_points=8))
    assert result.checkpoints[0] == 1
    assert result.checkpoints[-1] == 40
    for g in result.groups:
        np.testing.assert_array_equal(g.checkpoint_p[:, -1], g.endpoints)
        assert g.paths is None and g.outcomes is None


def test_explicit_checkpoints_always_add_the_endpoint():
    result = run_cohort(_spec(checkpoints=(5, 10)))
    assert result.checkpoints.tolist() == [5, 10, 40]
    g = result.group("plain")
    np.testing.assert_array_equal(g.checkpoint_p[:, 0], g.paths[:, 4])
    np.testing.assert_array_equal(g.checkpoint_p[:, 1], g.paths[:, 9])


def test_checkpoint_grid_is_sorted_and_unique():
    grid = checkpoint_grid(10000, 32)
    assert grid[0] == 1 and grid[-1] == 10000
    assert np.all(np.diff(grid) > 0)
    assert checkpoint_grid(1).tolist() == [1]
    assert checkpoint_grid(3, 32).tolist() == [1, 2, 3]
    with pytest.raises(ValueError):
        checkpoint_grid(0)


def test_single_step_cohort():
    result = run_cohort(CohortSpec(groups=(GroupSpec("a", 4),), n_steps=1, record_full_paths=True))
    g = result.group("a")
    assert g.endpoints.tolist() == [0.5] * 4
    assert g.successes.tolist() == [0] * 4
    assert g.outcomes.shape == (4, 0)
    assert [t.probabilities for t in result.trajectories("a")] == [(0.5,)] * 4


def test_trajectories_require_full_paths():
    result = run_cohort(_spec(record_full_paths=False))
    with pytest.raises(ValueError):
        result.trajectories("plain")
    with pytest.raises(KeyError):
        result.group("missing")


def test_clamped_groups_stay_in_unit_interval():
    result = run_cohort(_spec())
    biased = result.group("biased")
    assert np.all((biased.paths >= 0.0) & (biased.paths <= 1.0))
    assert biased.regime_break_step is None


def test_unclamped_group_reports_regime_break():
    result = run_cohort(_spec())
    # γ_i = i/(i+1)：1 − γ_i < 0.22 从 i = 4 开始
    assert result.group("unclamped").regime_break_step == 4


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(groups=()),
        dict(groups=(GroupSpec("a", 1), GroupSpec("a", 2))),
        dict(n_steps=0),
        dict(n_steps=2.5),
        dict(n_steps="40"),
        dict(checkpoints=(0, 5)),
        dict(checkpoints=(41,)),
    ],
)
def test_spec_validation(kwargs):
    with pytest.raises(ValueError):
        _spec(**kwargs)


def test_group_spec_validation():
    with pytest.raises(ValueError):
        GroupSpec("", 3)
    with pytest.raises(ValueError):
        GroupSpec("a", 0)


def test_run_cohort_argument_validation():
    with pytest.raises(ValueError):
        run_cohort(_spec(), threads=0)
    with pytest.raises(ValueError):
        run_cohort(_spec(), chunk_size=0)


def test_seed_derivations_record_first_member():
    derivations = group_seed_derivations(_spec())
    assert list(derivations) == ["plain", "slow", "biased", "unclamped"]
    assert derivations["slow"]["member_0_seed"] == derive_seed(31337, 1, 0)
    assert derivations["slow"]["size"] == 7


def test_float_step_count_is_normalised():
    assert CohortSpec(groups=(GroupSpec("a", 2),), n_steps=5.0).n_steps == 5


def test_identical_groups_draw_independent_but_alike_endpoints():
    twin = GroupSpec(name="first", size=5000)
    spec = CohortSpec(groups=(twin, GroupSpec(name="second", size=5000)), n_steps=50, master_seed=8)
    result = run_cohort(spec)
    first, second = result.group("first").endpoints, result.group("second").endpoints
    assert not np.array_equal(first, second)
    distance = ks_two_sample(EmpiricalDistribution.from_samples(first), EmpiricalDistribution.from_samples(second))
    # 1.95·sqrt(2/5000)：双样本 KS 在 0.1% 水平的临界值
    assert distance < 0.039


def test_tiny_reinforcement_keeps_risk_near_start():
    group = GroupSpec(name="frozen", size=1000, urn=UrnParams(b0=1.0, r0=1.0, k=1e-9))
    result = run_cohort(CohortSpec(groups=(group,), n_steps=10, master_seed=4, record_full_paths=True))
    assert np.max(np.abs(result.group("frozen").paths - 0.5)) < 1e-7
    assert extreme_mass(result, 0.05)["frozen"].total == 0.0
