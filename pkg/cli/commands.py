from __future__ import annotations

"""
子命令实现：simulate / cohort / analyze / score / regress。

每个命令：
1. 调用领域模块完成计算（并行只发生在 cohort 引擎内部）；
2. 在主线程中按固定顺序写出结果；
3. 写出 RunManifest（--out 的同名 .manifest.json，或 stdout 输出时写到 stderr）。
"""

import csv
import io
from datetime import date
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from cohort.disparity import disparity_metrics
from cohort.engine import CohortResult, group_seed_derivations, run_cohort
from limit_analysis.beta import beta_cdf, beta_density_curve, beta_moments, limit_beta_params
from limit_analysis.empirical import (
    EmpiricalDistribution,
    extreme_fractions,
    histogram,
    ks_statistic,
    sample_moments,
)
from limit_analysis.martingale import expected_risk_path, martingale_check
from logger.logger import get_logger
from logger.trace import get_trace
from process_core.bias import BiasSpec
from process_core.urn import UrnParams
from regression.ols import ols_fit
from regression.report import describe_design, format_describe, format_table, read_design_csv
from regression.synth import coverage_run, generate_synth_cohort, scenario_from_config
from scoring.events import read_events
from scoring.factors import CurrentCharge, derive_factors, read_records
from scoring.scorer import describe_scores, score
from scoring.table import FIXTURE_TABLE_PATH, load_table
from validators.limit_checker import LimitChecker, LimitInput
from .config_loader import to_bias, to_cohort_spec, to_urn
from .schemas import ScenarioConfig
from .writers import (
    build_manifest,
    dumps_json,
    manifest_path_for,
    open_output,
    trajectories_to_dict,
    write_checkpoint_csv,
    write_endpoint_csv,
    write_json,
    write_manifest,
    write_trajectory_csv,
)

logger = get_logger(__name__)

PathLike = Union[str, Path]

# a + b 很大时连分式收敛过慢，KS 改为不报告
KS_MAX_SHAPE_SUM = 1e6


def _finish(
    command: str,
    scenario: ScenarioConfig,
    out: Optional[PathLike],
    manifest: Optional[PathLike],
    seed_derivations: Optional[Dict[str, Any]] = None,
    parameters: Optional[Dict[str, Any]] = None,
    extra_outputs: Sequence[str] = (),
) -> Dict[str, Any]:
    outputs = [str(out) if out is not None else "<stdout>", *extra_outputs]
    m = build_manifest(
        command=command,
        run_id=get_trace() or "-",
        scenario=scenario,
        seed_derivations=seed_derivations,
        parameters=parameters,
        outputs=outputs,
    )
    m_path = manifest_path_for(out, manifest)
    write_manifest(m, m_path)
    return {"outputs": outputs, "manifest": str(m_path) if m_path else "<stderr>"}


# ---------------------------------------------------------------------- #
# simulate
# ---------------------------------------------------------------------- #

def cmd_simulate(
    scenario: ScenarioConfig,
    out: Optional[PathLike] = None,
    manifest: Optional[PathLike] = None,
    threads: int = 1,
    preset: Optional[str] = None,
) -> Dict[str, Any]:
    spec = to_cohort_spec(scenario, record_full_paths=True)
    result = run_cohort(spec, threads=threads)

    trajectories = []
    ids: List[str] = []
    for g in result.groups:
        for j, traj in enumerate(result.trajectories(g.name)):
            trajectories.append(traj)
            ids.append(str(j) if len(result.groups) == 1 else f"{g.name}-{j}")

    with open_output(out) as stream:
        if scenario.output.format == "json":
            write_json(stream, {"trajectories": trajectories_to_dict(trajectories, ids)})
            rows = len(trajectories)
        else:
            rows = write_trajectory_csv(stream, trajectories, ids)

    logger.info("cmd_simulate_done", trajectories=len(trajectories), steps=scenario.steps, rows=rows)
    summary = _finish(
        "simulate",
        scenario,
        out,
        manifest,
        seed_derivations=group_seed_derivations(spec),
        parameters={"preset": preset, "threads_independent": True},
    )
    summary["rows"] = rows
    return summary


# ---------------------------------------------------------------------- #
# cohort
# ---------------------------------------------------------------------- #

def cmd_cohort(
    scenario: ScenarioConfig,
    out: Optional[PathLike] = None,
    manifest: Optional[PathLike] = None,
    threads: int = 1,
    endpoints_out: Optional[PathLike] = None,
) -> Dict[str, Any]:
    spec = to_cohort_spec(scenario)
    result = run_cohort(spec, threads=threads)
    report = disparity_metrics(result, epsilon=scenario.output.epsilon, bins=scenario.output.hist_bins)

    with open_output(out) as stream:
        if scenario.output.format == "json":
            write_json(stream, report.to_dict())
        else:
            write_checkpoint_csv(stream, result)

    extra: List[str] = []
    if endpoints_out is not None:
        with open_output(endpoints_out) as stream:
            rows = write_endpoint_csv(stream, result)
        extra.append(str(endpoints_out))
        logger.info("cmd_cohort_endpoints_written", path=str(endpoints_out), rows=rows)

    logger.info("cmd_cohort_done", groups=len(result.groups), checkpoints=len(report.checkpoints))
    summary = _finish(
        "cohort", scenario, out, manifest, seed_derivations=group_seed_derivations(spec), extra_outputs=extra
    )
    summary["report"] = report
    return summary


# ---------------------------------------------------------------------- #
# analyze
# ---------------------------------------------------------------------- #

def _parse_float(raw: Optional[str], path: Path, line_number: int) -> float:
    try:
        return float(raw)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"endpoint file {path} line {line_number}: bad p value {raw!r}") from exc


def read_endpoints(path: PathLike) -> np.ndarray:
    """
    读取终点文件：
    - 带 p 列的 CSV（如 cohort --endpoints-out 的输出），每行一个终点；
    - 带 step 列的轨迹 CSV（simulate 的输出），按 trajectory_id 取最大 step 的 p，按首次出现顺序；
    - 无表头时每行一个数值。
    """
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as f:
        text = f.read()
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines:
        raise ValueError(f"endpoint file {path} contains no endpoints")

    first = lines[0].strip()
    try:
        float(first)
        has_header = False
    except ValueError:
        has_header = True

    values: List[float] = []
    if has_header:
        reader = csv.DictReader(io.StringIO("\n".join(lines)))
        fieldnames = reader.fieldnames or []
        if "p" not in fieldnames:
            raise ValueError(f"endpoint file {path} has a header without a 'p' column: {fieldnames}")
        if "step" in fieldnames:
            if "trajectory_id" not in fieldnames:
                raise ValueError(f"endpoint file {path} has a 'step' column but no 'trajectory_id' column")
            # trajectory_id -> (step, p)
            last: Dict[str, Tuple[int, float]] = {}
            for line_number, row in enumerate(reader, start=2):
                try:
                    step = int(row["step"])
                except (TypeError, ValueError) as exc:
                    raise ValueError(f"endpoint file {path} line {line_number}: bad step {row['step']!r}") from exc
                p = _parse_float(row["p"], path, line_number)
                key = row["trajectory_id"]
                if key not in last or step > last[key][0]:
                    last[key] = (step, p)
            values = [p for _, p in last.values()]
        else:
            for line_number, row in enumerate(reader, start=2):
                values.append(_parse_float(row["p"], path, line_number))
    else:
        for line_number, line in enumerate(lines, start=1):
            try:
                values.append(float(line.strip()))
            except ValueError as exc:
                raise ValueError(f"endpoint file {path} line {line_number}: bad value {line.strip()!r}") from exc

    if not values:
        raise ValueError(f"endpoint file {path} contains no endpoints")
    return np.array(values, dtype=np.float64)


def analyze_endpoints(
    endpoints: np.ndarray,
    urn: UrnParams,
    bias: BiasSpec,
    n_steps: int,
    epsilon: float,
    bins: int,
) -> Dict[str, Any]:
    if endpoints.size == 0:
        raise ValueError("analysis requires at least one endpoint")
    params = limit_beta_params(urn)
    limit_mean, limit_var = beta_moments(params)
    dist = EmpiricalDistribution.from_samples(np.clip(endpoints, 0.0, 1.0))
    limit_applies = bias.is_unbiased

    report: Dict[str, Any] = {
        "m": int(endpoints.size),
        "limit": {
            "a": params.a,
            "b": params.b,
            "mean": limit_mean,
            "variance": limit_var,
            "applies": limit_applies,
        },
    }

    ks = None
    if limit_applies and params.a + params.b <= KS_MAX_SHAPE_SUM:
        ks = ks_statistic(dist, lambda x: beta_cdf(params, x))
    report["ks_distance"] = ks

    sample_mean = float(np.mean(endpoints))
    sample_var = None
    martingale = None
    if endpoints.size >= 2:
        _, sample_var = sample_moments(dist)
        if limit_applies:
            check = martingale_check(endpoints, urn.p1)
            martingale = {"p1": urn.p1, "mean": check.mean, "se": check.se, "z": check.z}
        else:
            expected = float(expected_risk_path(urn, bias, n_steps)[-1])
            check = martingale_check(endpoints, expected)
            martingale = {
                "expected_mean_unclamped": expected,
                "mean": check.mean,
                "se": check.se,
                "z_vs_expected": check.z,
            }
    report["moments"] = {"mean": sample_mean, "variance": sample_var}
    report["martingale"] = martingale

    lower, upper = extreme_fractions(dist, epsilon)
    oracle = beta_cdf(params, epsilon) + (1.0 - beta_cdf(params, 1.0 - epsilon))
    report["extreme_mass"] = {
        "epsilon": epsilon,
        "lower": lower,
        "upper": upper,
        "total": lower + upper,
        "beta_oracle": oracle if limit_applies else None,
    }

    edges, masses = histogram(dist, bins)
    report["histogram"] = {"edges": edges, "masses": masses}
    report["density"] = [[x, f] for x, f in beta_density_curve(params, points=max(2, bins * 5))]

    if limit_applies:
        checked = LimitChecker().evaluate(
            LimitInput(
                ks_distance=ks,
                martingale_z=martingale["z"] if martingale else None,
                sample_variance=sample_var,
                limit_variance=limit_var,
                extreme_mass=lower + upper,
                extreme_mass_oracle=oracle,
            )
        )
        report["checks"] = {"ok": checked.ok, "passed": checked.checks, "failures": checked.failures}
    return report


def cmd_analyze(
    scenario: ScenarioConfig,
    endpoints_path: Optional[PathLike] = None,
    out: Optional[PathLike] = None,
    manifest: Optional[PathLike] = None,
    threads: int = 1,
) -> Dict[str, Any]:
    eps, bins = scenario.output.epsilon, scenario.output.hist_bins
    groups: Dict[str, Any] = {}
    seed_derivations: Dict[str, Any] = {}

    if endpoints_path is not None:
        endpoints = read_endpoints(endpoints_path)
        groups["endpoints"] = analyze_endpoints(
            endpoints, to_urn(scenario.urn), to_bias(scenario.bias), scenario.steps, eps, bins
        )
    else:
        spec = to_cohort_spec(scenario, record_full_paths=False)
        result: CohortResult = run_cohort(spec, threads=threads)
        seed_derivations = group_seed_derivations(spec)
        for g in result.groups:
            groups[g.name] = analyze_endpoints(
                g.endpoints, g.spec.urn, g.spec.bias, spec.n_steps, eps, bins
            )

    report = {"steps": scenario.steps, "groups": groups}
    with open_output(out) as stream:
        write_json(stream, report)

    logger.info("cmd_analyze_done", groups=len(groups), source="file" if endpoints_path else "simulation")
    summary = _finish(
        "analyze",
        scenario,
        out,
        manifest,
        seed_derivations=seed_derivations,
        parameters={"endpoints": str(endpoints_path) if endpoints_path else None},
    )
    summary["report"] = report
    return summary


# ---------------------------------------------------------------------- #
# score
# ---------------------------------------------------------------------- #

def cmd_score(
    scenario: ScenarioConfig,
    age: Optional[int] = None,
    as_of: Optional[date] = None,
    events_path: Optional[PathLike] = None,
    table_path: Optional[PathLike] = None,
    violent_offense: bool = False,
    pending_charge: bool = False,
    out: Optional[PathLike] = None,
    manifest: Optional[PathLike] = None,
    batch_path: Optional[PathLike] = None,
) -> Dict[str, Any]:
    table = load_table(Path(table_path) if table_path else FIXTURE_TABLE_PATH)
    table_ref = str(table_path) if table_path else str(FIXTURE_TABLE_PATH)

    if batch_path is not None:
        if events_path is not None:
            raise ValueError("--batch and --events are mutually exclusive")
        records = read_records(batch_path)
        all_scores = [score(r, table) for r in records]
        payload: Dict[str, Any] = {
            "table": table.name,
            "records": len(records),
            "scores": [s.to_dict() for s in all_scores],
            "summary": describe_scores(all_scores),
        }
        parameters: Dict[str, Any] = {"batch": str(batch_path), "table": table_ref}
        logger.info("cmd_score_batch_done", table=table.name, records=len(records))
    else:
        if age is None or as_of is None:
            raise ValueError("score requires --age and --as-of unless --batch is given")
        events = read_events(events_path) if events_path else []
        record = derive_factors(
            events,
            CurrentCharge(age=age, violent_offense=violent_offense, pending_charge=pending_charge),
            as_of,
        )
        scores = score(record, table)
        payload = {
            "table": table.name,
            "as_of": as_of.isoformat(),
            "events": len(events),
            "record": record.to_dict(),
            "scores": scores.to_dict(),
        }
        parameters = {
            "events": str(events_path) if events_path else None,
            "table": table_ref,
            "age": age,
            "as_of": as_of.isoformat(),
            "violent_offense": violent_offense,
            "pending_charge": pending_charge,
        }
        logger.info("cmd_score_done", table=table.name, **scores.to_dict())

    with open_output(out) as stream:
        write_json(stream, payload)

    summary = _finish("score", scenario, out, manifest, parameters=parameters)
    summary["payload"] = payload
    return summary


# ---------------------------------------------------------------------- #
# regress
# ---------------------------------------------------------------------- #

def cmd_regress(
    scenario: ScenarioConfig,
    csv_path: Optional[PathLike] = None,
    scenario_name: Optional[str] = None,
    n: Optional[int] = None,
    noise_sd: Optional[float] = None,
    describe: bool = False,
    coverage_seeds: int = 0,
    out: Optional[PathLike] = None,
    manifest: Optional[PathLike] = None,
    threads: int = 1,
) -> Dict[str, Any]:
    parameters: Dict[str, Any] = {}
    if csv_path is not None:
        design, y = read_design_csv(csv_path)
        title = f"OLS on {Path(csv_path).name}"
        parameters["csv"] = str(csv_path)
        synth_spec = None
    else:
        name = scenario_name or "all_charges"
        synth_spec = scenario_from_config(name, seed=scenario.seed, noise_sd=noise_sd, n=n)
        design, y = generate_synth_cohort(synth_spec)
        title = f"OLS on synthetic scenario {name} (seed {scenario.seed})"
        parameters.update({"scenario": name, "n": synth_spec.n, "noise_sd": synth_spec.noise_sd})

    result = ols_fit(design, y)
    payload: Dict[str, Any] = {"title": title, "result": result.to_dict()}
    text = format_table(result, title=title)

    if describe:
        summary_stats = describe_design(design)
        payload["design"] = summary_stats
        text += "\n" + format_describe(summary_stats)

    if coverage_seeds:
        if synth_spec is None:
            raise ValueError("--coverage requires a synthetic scenario, not a CSV design")
        seeds = [scenario.seed + i for i in range(coverage_seeds)]
        coverage = coverage_run(synth_spec, seeds, threads=threads)
        payload["coverage"] = coverage.to_dict()
        text += (
            f"\nCI coverage of {coverage.column} over {len(seeds)} seeds: {coverage.ci_coverage:.3f}"
            f" (within 2 SE: {coverage.within_se(2.0):.3f})\n"
        )

    extra: List[str] = []
    with open_output(out) as stream:
        if scenario.output.format == "json":
            stream.write(dumps_json(payload))
        else:
            stream.write(text)
    twin = Path(out).with_suffix(".json") if out is not None else None
    if twin is not None and twin != Path(out) and scenario.output.format != "json":
        twin.write_text(dumps_json(payload), encoding="utf-8")
        extra.append(str(twin))

    logger.info("cmd_regress_done", n=result.n, p=len(result.columns), r_squared=result.r_squared)
    summary = _finish("regress", scenario, out, manifest, parameters=parameters, extra_outputs=extra)
    summary["result"] = result
    return summary


__all__ = [
    "analyze_endpoints",
    "cmd_analyze",
    "cmd_cohort",
    "cmd_regress",
    "cmd_score",
    "cmd_simulate",
    "read_endpoints",
]
