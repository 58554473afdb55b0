from __future__ import annotations

"""
多组 cohort 模拟引擎。

- 组 g 的成员 j 使用种子 derive_seed(master_seed, g, j)，逐位等同于
  simulate_trajectory(TrajectoryParams(urn, bias, N, seed))；
- 每组成员按固定 chunk_size 切块，块在线程池中并行，块内按步向量化；
  块划分与线程数无关，结果写入预分配数组的固定位置，因此输出与线程数、调度无关；
- record_full_paths = False 时只保留检查点上的 p、终点与成功次数。
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import yaml

from logger.logger import get_logger
from process_core.bias import BiasSpec, ClampPolicy, NO_BIAS
from process_core.rng import derive_seeds, splitmix64_uniforms
from process_core.trajectory import Trajectory
from process_core.urn import UrnParams, gamma_at

logger = get_logger(__name__)


def _load_defaults() -> Tuple[int, int]:
    project_root = Path(__file__).resolve().parents[1]
    with (project_root / "config" / "simulation.yaml").open("r", encoding="utf-8") as f:
        sim_cfg = yaml.safe_load(f)
    with (project_root / "config" / "rules.yaml").open("r", encoding="utf-8") as f:
        rules = yaml.safe_load(f)
    chunk_size = int(sim_cfg.get("engine", {}).get("chunk_size", 4096))
    grid_points = int(rules.get("cohort", {}).get("checkpoint_grid", 32))
    return chunk_size, grid_points


DEFAULT_CHUNK_SIZE, DEFAULT_GRID_POINTS = _load_defaults()


@dataclass(frozen=True)
class GroupSpec:
    name: str
    size: int
    urn: UrnParams = field(default_factory=UrnParams)
    bias: BiasSpec = NO_BIAS

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("GroupSpec.name must be non-empty")
        if isinstance(self.size, bool) or int(self.size) != self.size or self.size < 1:
            raise ValueError(f"GroupSpec.size must be an integer >= 1, got {self.size!r}")


@dataclass(frozen=True)
class CohortSpec:
    groups: Tuple[GroupSpec, ...]
    n_steps: int
    master_seed: int = 0
    record_full_paths: bool = False
    checkpoints: Optional[Tuple[int, ...]] = None
    grid_points: int = DEFAULT_GRID_POINTS

    def __post_init__(self) -> None:
        object.__setattr__(self, "groups", tuple(self.groups))
        if not self.groups:
            raise ValueError("CohortSpec requires at least one group")
        names = [g.name for g in self.groups]
        if len(set(names)) != len(names):
            raise ValueError(f"CohortSpec group names must be unique, got {names}")
        if isinstance(self.n_steps, bool) or int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ValueError(f"CohortSpec.n_steps must be an integer >= 1, got {self.n_steps!r}")
        object.__setattr__(self, "n_steps", int(self.n_steps))
        if self.checkpoints is not None:
            cps = tuple(int(c) for c in self.checkpoints)
            bad = [c for c in cps if c < 1 or c > self.n_steps]
            if bad:
                raise ValueError(f"checkpoints must lie in [1, {self.n_steps}], got {bad}")
            object.__setattr__(self, "checkpoints", cps)


@dataclass
class GroupResult:
    name: str
    index: int
    spec: GroupSpec
    seeds: np.ndarray
    endpoints: np.ndarray
    successes: np.ndarray
    checkpoint_p: np.ndarray
    paths: Optional[np.ndarray] = None
    outcomes: Optional[np.ndarray] = None
    regime_break_step: Optional[int] = None


@dataclass
class CohortResult:
    spec: CohortSpec
    checkpoints: np.ndarray
    groups: Tuple[GroupResult, ...]

    def group(self, name: str) -> GroupResult:
        for g in self.groups:
            if g.name == name:
                return g
        raise KeyError(f"unknown group: {name}")

    def trajectories(self, name: str) -> List[Trajectory]:
        """
        由完整路径重建 Trajectory，仅 record_full_paths = True 时可用。
        """
        g = self.group(name)
        if g.paths is None or g.outcomes is None:
            raise ValueError("full paths were not recorded; rerun with record_full_paths=True")
        # 越界标记一旦置位不再清除：p_b..p_N 都计入
        n = self.spec.n_steps
        out_of_regime = 0 if g.regime_break_step is None else n - g.regime_break_step + 1
        return [
            Trajectory(
                probabilities=tuple(float(v) for v in g.paths[j]),
                outcomes=tuple(int(v) for v in g.outcomes[j]),
                out_of_regime_steps=out_of_regime,
            )
            for j in range(g.paths.shape[0])
        ]


# ---------------------------------------------------------------------- #
# 检查点
# ---------------------------------------------------------------------- #

def checkpoint_grid(n_steps: int, points: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """
    1..N 上的几何网格（含 1 与 N），去重升序。
    """
    if n_steps < 1:
        raise ValueError(f"n_steps must be >= 1, got {n_steps}")
    if n_steps == 1 or points < 2:
        return np.unique(np.array([1, n_steps], dtype=np.int64))
    grid = np.rint(np.geomspace(1, n_steps, num=points)).astype(np.int64)
    return np.unique(np.concatenate([grid, [1, n_steps]]))


def _resolve_checkpoints(spec: CohortSpec) -> np.ndarray:
    if spec.checkpoints is not None:
        return np.unique(np.array(spec.checkpoints + (spec.n_steps,), dtype=np.int64))
    return checkpoint_grid(spec.n_steps, spec.grid_points)


def _regime_break_step(urn: UrnParams, bias: BiasSpec, n_steps: int) -> Optional[int]:
    if bias.rho == 0.0:
        return None
    for i in range(2, n_steps + 1):
        if 1.0 - gamma_at(urn, i) - bias.rho < 0.0:
            return i
    return None


# ---------------------------------------------------------------------- #
# 模拟
# ---------------------------------------------------------------------- #

def _simulate_block(
    group: GroupSpec,
    group_index: int,
    master_seed: int,
    start: int,
    stop: int,
    n_steps: int,
    checkpoints: np.ndarray,
    out: GroupResult,
    record_full_paths: bool,
) -> None:
    urn, bias = group.urn, group.bias
    clamp = bias.clamp_policy is ClampPolicy.CLAMP_UNIT_INTERVAL
    size = stop - start

    seeds = derive_seeds(master_seed, group_index, np.arange(start, stop, dtype=np.uint64))
    p = np.full(size, urn.p1, dtype=np.float64)
    successes = np.zeros(size, dtype=np.int64)
    cp_col = {int(c): col for col, c in enumerate(checkpoints)}
    block_cp = np.empty((size, len(checkpoints)), dtype=np.float64)

    if 1 in cp_col:
        block_cp[:, cp_col[1]] = p
    if record_full_paths:
        out.paths[start:stop, 0] = p

    r = float(bias.group_indicator)
    for i in range(1, n_steps):
        # 第 i 次决策：X_i ~ Bernoulli(p_i)，得到 p_{i+1}
        u = splitmix64_uniforms(seeds, i)
        x = u < (p if clamp else np.clip(p, 0.0, 1.0))
        xf = x.astype(np.float64)
        gamma = gamma_at(urn, i + 1)
        p = p * gamma + (xf * (1.0 - gamma) + (r - xf) * bias.rho)
        if clamp:
            np.clip(p, 0.0, 1.0, out=p)
        successes += x

        if record_full_paths:
            out.paths[start:stop, i] = p
            out.outcomes[start:stop, i - 1] = x
        col = cp_col.get(i + 1)
        if col is not None:
            block_cp[:, col] = p

    out.seeds[start:stop] = seeds
    out.endpoints[start:stop] = p
    out.successes[start:stop] = successes
    out.checkpoint_p[start:stop, :] = block_cp


def run_cohort(
    spec: CohortSpec, threads: int = 1, chunk_size: int = DEFAULT_CHUNK_SIZE
) -> CohortResult:
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")

    checkpoints = _resolve_checkpoints(spec)
    n = spec.n_steps
    logger.info(
        "run_cohort_start",
        groups=len(spec.groups),
        members=sum(g.size for g in spec.groups),
        n_steps=n,
        threads=threads,
        checkpoints=len(checkpoints),
    )

    results: List[GroupResult] = []
    tasks = []
    for g_idx, group in enumerate(spec.groups):
        out = GroupResult(
            name=group.name,
            index=g_idx,
            spec=group,
            seeds=np.empty(group.size, dtype=np.uint64),
            endpoints=np.empty(group.size, dtype=np.float64),
            successes=np.empty(group.size, dtype=np.int64),
            checkpoint_p=np.empty((group.size, len(checkpoints)), dtype=np.float64),
            paths=np.empty((group.size, n), dtype=np.float64) if spec.record_full_paths else None,
            outcomes=np.empty((group.size, n - 1), dtype=np.int8) if spec.record_full_paths else None,
            regime_break_step=(
                _regime_break_step(group.urn, group.bias, n)
                if group.bias.clamp_policy is ClampPolicy.UNCLAMPED
                else None
            ),
        )
        results.append(out)
        for start in range(0, group.size, chunk_size):
            stop = min(start + chunk_size, group.size)
            tasks.append((group, g_idx, start, stop, out))

    def _run(task) -> None:
        group, g_idx, start, stop, out = task
        _simulate_block(
            group, g_idx, spec.master_seed, start, stop, n, checkpoints, out, spec.record_full_paths
        )

    if threads == 1 or len(tasks) == 1:
        for task in tasks:
            _run(task)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            # list() 触发异常传播
            list(pool.map(_run, tasks))

    for g in results:
        if g.regime_break_step is not None:
            logger.warning(
                "cohort_group_out_of_regime",
                group=g.name,
                from_step=g.regime_break_step,
                rho=g.spec.bias.rho,
            )
    logger.info("run_cohort_done", blocks=len(tasks))
    return CohortResult(spec=spec, checkpoints=checkpoints, groups=tuple(results))


def group_seed_derivations(spec: CohortSpec) -> Dict[str, Dict[str, object]]:
    """
    RunManifest 用：每组的派生规则与首个成员的种子。
    """
    derivations: Dict[str, Dict[str, object]] = {}
    for g_idx, group in enumerate(spec.groups):
        first = int(derive_seeds(spec.master_seed, g_idx, np.array([0], dtype=np.uint64))[0])
        derivations[group.name] = {
            "group_index": g_idx,
            "rule": "mix64(mix64(master + (g+1)*GAMMA) + (j+1)*GAMMA)",
            "member_0_seed": first,
            "size": group.size,
        }
    return derivations


__all__ = [
    "CohortResult",
    "CohortSpec",
    "GroupResult",
    "GroupSpec",
    "checkpoint_grid",
    "group_seed_derivations",
    "run_cohort",
]
