from __future__ import annotations

"""
合成犯因性（criminogenic）cohort。

真实案卷数据不可得，这里按已知真值 β* 生成 Y = Xβ* + ε：
- 控制变量按 `config/regression.yaml` 中的生成器抽取（normal / uniform / bernoulli / poisson），
  也可以取自罐过程模拟（urn_successes：每名被告前若干次决策中的高风险次数）；
- 处理变量（默认 confinement_max）= 均值 + 标准差·z + Σ 载荷·标准化控制变量，制造与控制变量的相关；
- score_controls 为真时，用合成因子经评分表算出 fta_score / nca_score / nvca_score 作为控制；
- 删失问题不建模：每个合成被告都有完整的观察窗口。

设计矩阵与噪声来自两条独立随机流，因此改变 noise_sd 不会改变 X。
"""

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import yaml
from scipy import linalg

from cohort.engine import CohortSpec, GroupSpec, run_cohort
from logger.logger import get_logger
from process_core.urn import UrnParams
from scoring.scorer import score_arrays
from scoring.table import ScoreTable, load_fixture_table
from .ols import INTERCEPT, DesignMatrix, RegressionResult, ols_fit

logger = get_logger(__name__)

SCORE_COLUMNS = ("fta_score", "nca_score", "nvca_score")
_COVARIATE_KINDS = {
    "normal": ("mean", "sd"),
    "uniform": ("low", "high"),
    "bernoulli": ("p",),
    "poisson": ("lam",),
    "urn_successes": ("steps", "b0", "r0", "k"),
}


def _load_config() -> dict:
    project_root = Path(__file__).resolve().parents[1]
    with (project_root / "config" / "regression.yaml").open("r", encoding="utf-8") as f:
        return yaml.safe_load(f)


_CONFIG = _load_config()
_DEFAULTS = _CONFIG.get("defaults", {})


@dataclass(frozen=True)
class CovariateSpec:
    kind: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in _COVARIATE_KINDS:
            raise ValueError(f"unknown covariate kind: {self.kind!r}, allowed={sorted(_COVARIATE_KINDS)}")
        missing = [name for name in _COVARIATE_KINDS[self.kind] if name not in self.params]
        if missing:
            raise ValueError(f"covariate kind {self.kind!r} requires parameters {missing}")

    @classmethod
    def from_config(cls, raw: Mapping[str, object]) -> "CovariateSpec":
        params = {k: v for k, v in raw.items() if k != "kind"}
        return cls(kind=str(raw["kind"]), params=params)


@dataclass(frozen=True)
class SynthCohortSpec:
    n: int
    true_beta: Mapping[str, float]
    noise_sd: float
    covariates: Mapping[str, CovariateSpec] = field(default_factory=dict)
    treatment: str = str(_DEFAULTS.get("treatment", "confinement_max"))
    treatment_mean: float = float(_DEFAULTS.get("treatment_mean", 365.0))
    treatment_sd: float = float(_DEFAULTS.get("treatment_sd", 300.0))
    treatment_loadings: Mapping[str, float] = field(default_factory=dict)
    score_controls: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.noise_sd < 0.0:
            raise ValueError(f"SynthCohortSpec.noise_sd must be >= 0, got {self.noise_sd!r}")
        if self.treatment_sd < 0.0:
            raise ValueError(f"SynthCohortSpec.treatment_sd must be >= 0, got {self.treatment_sd!r}")
        for name in self.treatment_loadings:
            if name not in self.covariates:
                raise ValueError(f"treatment loading refers to unknown covariate: {name}")
        columns = self.column_names
        missing = [c for c in columns if c not in self.true_beta]
        extra = [c for c in self.true_beta if c not in columns]
        if missing or extra:
            raise ValueError(
                f"true_beta must name exactly the design columns; missing={missing}, unknown={extra}"
            )
        if self.n <= len(columns):
            raise ValueError(
                f"SynthCohortSpec.n must exceed the number of columns ({len(columns)}), got {self.n}"
            )

    @property
    def column_names(self) -> Tuple[str, ...]:
        names: List[str] = [INTERCEPT, self.treatment, *self.covariates]
        if self.score_controls:
            names.extend(SCORE_COLUMNS)
        return tuple(names)

    def beta_vector(self) -> np.ndarray:
        return np.array([self.true_beta[c] for c in self.column_names], dtype=np.float64)


# ---------------------------------------------------------------------- #
# Internal helpers
# ---------------------------------------------------------------------- #

def _draw_covariate(name: str, spec: CovariateSpec, rng: np.random.Generator, n: int, seed: int) -> np.ndarray:
    p = spec.params
    if spec.kind == "normal":
        return rng.normal(float(p["mean"]), float(p["sd"]), size=n)
    if spec.kind == "uniform":
        return rng.uniform(float(p["low"]), float(p["high"]), size=n)
    if spec.kind == "bernoulli":
        return (rng.random(n) < float(p["p"])).astype(np.float64)
    if spec.kind == "poisson":
        return rng.poisson(float(p["lam"]), size=n).astype(np.float64)

    # urn_successes：每个被告一条罐过程轨迹，取前 steps−1 次决策的高风险次数
    urn = UrnParams(b0=float(p["b0"]), r0=float(p["r0"]), k=float(p["k"]))
    cohort = CohortSpec(
        groups=(GroupSpec(name=name, size=n, urn=urn),),
        n_steps=int(p["steps"]),
        master_seed=seed,
    )
    return run_cohort(cohort).groups[0].successes.astype(np.float64)


def _synthetic_factors(rng: np.random.Generator, ages: np.ndarray) -> Dict[str, np.ndarray]:
    n = ages.shape[0]
    return {
        "age_at_arrest": ages,
        "current_violent_offense": rng.random(n) < 0.2,
        "pending_charge_at_offense": rng.random(n) < 0.25,
        "prior_misdemeanor": rng.random(n) < 0.45,
        "prior_felony": rng.random(n) < 0.35,
        "prior_violent_conviction_count": rng.poisson(0.4, size=n),
        "fta_within_2yr_count": rng.poisson(0.5, size=n),
        "fta_older_2yr_count": rng.poisson(0.3, size=n),
        "prior_incarceration": rng.random(n) < 0.3,
    }


def _standardize(values: np.ndarray) -> np.ndarray:
    sd = values.std()
    return (values - values.mean()) / sd if sd > 0.0 else np.zeros_like(values)


def _design(spec: SynthCohortSpec, table: Optional[ScoreTable]) -> DesignMatrix:
    rng = np.random.default_rng([spec.seed, 0])
    n = spec.n
    columns: Dict[str, np.ndarray] = {}
    for name, cov in spec.covariates.items():
        columns[name] = _draw_covariate(name, cov, rng, n, spec.seed)

    treatment = spec.treatment_mean + spec.treatment_sd * rng.standard_normal(n)
    for name, loading in spec.treatment_loadings.items():
        treatment = treatment + loading * _standardize(columns[name])

    data: Dict[str, np.ndarray] = {INTERCEPT: np.ones(n), spec.treatment: treatment}
    data.update(columns)

    if spec.score_controls:
        if "age" in columns:
            ages = np.clip(np.rint(columns["age"]), 18, 90).astype(np.int64)
        else:
            ages = rng.integers(18, 70, size=n)
        scores = score_arrays(_synthetic_factors(rng, ages), table or load_fixture_table())
        for output, column in zip(("fta", "nca", "nvca"), SCORE_COLUMNS):
            data[column] = scores[output].astype(np.float64)

    return DesignMatrix(columns=spec.column_names, values=np.column_stack([data[c] for c in spec.column_names]))


# ---------------------------------------------------------------------- #
# Public API
# ---------------------------------------------------------------------- #

def generate_synth_cohort(
    spec: SynthCohortSpec, table: Optional[ScoreTable] = None
) -> Tuple[DesignMatrix, np.ndarray]:
    design = _design(spec, table)
    noise_rng = np.random.default_rng([spec.seed, 1])
    noise = noise_rng.normal(0.0, 1.0, size=spec.n) * spec.noise_sd
    y = design.values @ spec.beta_vector() + noise
    logger.debug("generate_synth_cohort", n=spec.n, p=design.p, seed=spec.seed, noise_sd=spec.noise_sd)
    return design, y


def calibrate_noise_sd(spec: SynthCohortSpec, target_se: float, column: Optional[str] = None) -> float:
    """
    选 noise_sd 使 column（默认处理变量）的理论标准误 σ·sqrt((XᵀX)⁻¹_jj) 等于 target_se。
    """
    if target_se <= 0.0:
        raise ValueError(f"target_se must be > 0, got {target_se!r}")
    design = _design(spec, None)
    idx = design.columns.index(column or spec.treatment)
    _, r, piv = linalg.qr(design.values, mode="economic", pivoting=True)
    r_inv = linalg.solve_triangular(r, np.eye(design.p))
    unit_var = float(np.sum(r_inv[int(np.where(piv == idx)[0][0])] ** 2))
    noise_sd = target_se / np.sqrt(unit_var)
    logger.info("calibrate_noise_sd", target_se=target_se, noise_sd=float(noise_sd), seed=spec.seed)
    return float(noise_sd)


def available_scenarios() -> List[str]:
    return sorted(_CONFIG.get("scenarios", {}))


def scenario_from_config(
    name: str,
    seed: int = 0,
    noise_sd: Optional[float] = None,
    n: Optional[int] = None,
) -> SynthCohortSpec:
    """
    由 regression.yaml 中的场景构造 SynthCohortSpec；
    未显式给出 noise_sd 且场景有 target_treatment_se 时自动标定。
    """
    scenarios = _CONFIG.get("scenarios", {})
    if name not in scenarios:
        raise ValueError(f"unknown regression scenario: {name!r}, available={available_scenarios()}")
    raw = scenarios[name]

    spec = SynthCohortSpec(
        n=int(n if n is not None else raw["n"]),
        true_beta={k: float(v) for k, v in raw["true_beta"].items()},
        noise_sd=float(noise_sd if noise_sd is not None else raw.get("noise_sd", _DEFAULTS.get("noise_sd", 100.0))),
        covariates={k: CovariateSpec.from_config(v) for k, v in raw.get("covariates", {}).items()},
        treatment=str(raw.get("treatment", _DEFAULTS.get("treatment", "confinement_max"))),
        treatment_mean=float(raw.get("treatment_mean", _DEFAULTS.get("treatment_mean", 365.0))),
        treatment_sd=float(raw.get("treatment_sd", _DEFAULTS.get("treatment_sd", 300.0))),
        treatment_loadings={k: float(v) for k, v in raw.get("treatment_loadings", {}).items()},
        score_controls=bool(raw.get("score_controls", False)),
        seed=seed,
    )
    target = raw.get("target_treatment_se")
    if noise_sd is None and target is not None:
        spec = dataclasses.replace(spec, noise_sd=calibrate_noise_sd(spec, float(target)))
    return spec


@dataclass
class CoverageReport:
    column: str
    true_value: float
    seeds: List[int]
    estimates: np.ndarray
    standard_errors: np.ndarray
    ci_covered: np.ndarray
    confidence_level: float

    @property
    def ci_coverage(self) -> float:
        return float(np.mean(self.ci_covered))

    def within_se(self, n_se: float = 2.0) -> float:
        return float(np.mean(np.abs(self.estimates - self.true_value) <= n_se * self.standard_errors))

    def to_dict(self) -> dict:
        return {
            "column": self.column,
            "true_value": self.true_value,
            "seeds": len(self.seeds),
            "ci_coverage": self.ci_coverage,
            "within_2se": self.within_se(2.0),
            "confidence_level": self.confidence_level,
            "mean_estimate": float(np.mean(self.estimates)),
            "mean_se": float(np.mean(self.standard_errors)),
        }


def coverage_run(
    spec: SynthCohortSpec,
    seeds: Sequence[int],
    column: Optional[str] = None,
    threads: int = 1,
) -> CoverageReport:
    """
    多种子重复拟合，统计置信区间覆盖真值的比例。各种子互不共享状态。
    """
    if not seeds:
        raise ValueError("coverage_run requires at least one seed")
    column = column or spec.treatment
    true_value = float(spec.true_beta[column])

    def _fit(seed: int) -> RegressionResult:
        design, y = generate_synth_cohort(dataclasses.replace(spec, seed=int(seed)))
        return ols_fit(design, y)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_fit, seeds))
    else:
        results = [_fit(s) for s in seeds]

    estimates = np.array([r.coefficient(column)[0] for r in results])
    ses = np.array([r.coefficient(column)[1] for r in results])
    covered = np.array([r.covers(column, true_value) for r in results])
    report = CoverageReport(
        column=column,
        true_value=true_value,
        seeds=[int(s) for s in seeds],
        estimates=estimates,
        standard_errors=ses,
        ci_covered=covered,
        confidence_level=results[0].confidence_level,
    )
    logger.info("coverage_run_done", column=column, seeds=len(seeds), ci_coverage=report.ci_coverage)
    return report


__all__ = [
    "SCORE_COLUMNS",
    "CoverageReport",
    "CovariateSpec",
    "SynthCohortSpec",
    "available_scenarios",
    "calibrate_noise_sd",
    "coverage_run",
    "generate_synth_cohort",
    "scenario_from_config",
]
