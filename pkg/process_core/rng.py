from __future__ import annotations

"""
计数器型 64 位随机数（splitmix64）。

- 每条轨迹一个 64 位种子 s，第 c 次抽样（c 从 1 开始）输出 mix64(s + c·GAMMA)，
  与顺序 splitmix64 流逐位相同，但任意 (种子, 计数) 都可以直接算，无共享状态；
- cohort 成员的种子由 derive_seed(master_seed, group, member) 派生；
- uniform：取高 53 位，u ∈ [0, 1)，Bernoulli 采用 u < p。

标量版本（Python int）与向量版本（numpy uint64）逐位一致。
"""

from typing import Union

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / (1 << 53)

_U_GAMMA = np.uint64(GAMMA)
_U_MIX_1 = np.uint64(MIX_1)
_U_MIX_2 = np.uint64(MIX_2)
_U_30 = np.uint64(30)
_U_27 = np.uint64(27)
_U_31 = np.uint64(31)
_U_11 = np.uint64(11)


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_2) & MASK64
    return z ^ (z >> 31)


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if seed < 0 or seed > MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def derive_seed(master_seed: int, group_index: int, member_index: int) -> int:
    """
    由 (master_seed, group, member) 派生成员种子：
        group_key = mix64(master + (g+1)·GAMMA)
        seed      = mix64(group_key + (j+1)·GAMMA)
    """
    master = _check_seed(master_seed)
    group_key = mix64(master + (group_index + 1) * GAMMA)
    return mix64(group_key + (member_index + 1) * GAMMA)


class SplitMix64:
    """
    顺序 splitmix64 流；counter 记录已消费的抽样次数。
    """

    __slots__ = ("seed", "counter")

    def __init__(self, seed: int, counter: int = 0) -> None:
        self.seed = _check_seed(seed)
        self.counter = int(counter)

    def next_u64(self) -> int:
        self.counter += 1
        return mix64(self.seed + self.counter * GAMMA)

    def next_uniform(self) -> float:
        return (self.next_u64() >> 11) * INV_2_53

    def copy(self) -> "SplitMix64":
        return SplitMix64(self.seed, self.counter)


# ---------------------------------------------------------------------- #
# 向量版本
# ---------------------------------------------------------------------- #

def _mix64_array(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U_30)) * _U_MIX_1
        z = (z ^ (z >> _U_27)) * _U_MIX_2
    return z ^ (z >> _U_31)


def derive_seeds(master_seed: int, group_index: int, member_indices: np.ndarray) -> np.ndarray:
    """
    derive_seed 的向量版本，返回 uint64 数组。
    """
    master = _check_seed(master_seed)
    group_key = np.uint64(mix64(master + (group_index + 1) * GAMMA))
    members = np.asarray(member_indices, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = group_key + (members + np.uint64(1)) * _U_GAMMA
    return _mix64_array(z)


def splitmix64_uniforms(seeds: np.ndarray, counter: Union[int, np.integer]) -> np.ndarray:
    """
    对每个种子取第 counter 次抽样的 uniform，等价于对应 SplitMix64 流的第 counter 个输出。
    """
    with np.errstate(over="ignore"):
        offset = np.uint64((int(counter) * GAMMA) & MASK64)
        z = seeds + offset
    out = _mix64_array(z) >> _U_11
    return out.astype(np.float64) * INV_2_53


__all__ = [
    "GAMMA",
    "SplitMix64",
    "derive_seed",
    "derive_seeds",
    "mix64",
    "splitmix64_uniforms",
]
