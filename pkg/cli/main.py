from __future__ import annotations

"""
rdl 命令行入口。

    rdl simulate --steps 10 --trajectories 5 --seed 7 --out paths.csv
    rdl cohort   --config groups.json --threads 8 --format json --endpoints-out ends.csv
    rdl analyze  --k 0.1 --steps 2000 --trajectories 20000
    rdl score    --events events.jsonl --age 21 --as-of 2024-06-15
    rdl score    --batch records.jsonl
    rdl regress  --scenario all_charges --describe

退出码：0 成功；1 校验错误；2 运行期 / 数值错误；3 I/O 错误。
"""

import argparse
import sys
from datetime import date
from typing import Any, Dict, Optional, Sequence

from numpy.linalg import LinAlgError

from logger.logger import get_logger
from logger.trace import new_trace
from .commands import cmd_analyze, cmd_cohort, cmd_regress, cmd_score, cmd_simulate
from .config_loader import available_presets, load_scenario, resolve_threads

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_IO = 3

# flag 目标 → 场景配置中的点分路径
_OVERRIDES = {
    "seed": "seed",
    "steps": "steps",
    "trajectories": "trajectories",
    "k": "urn.k",
    "b0": "urn.b0",
    "r0": "urn.r0",
    "rho": "bias.rho",
    "group_indicator": "bias.group_indicator",
    "clamp": "bias.clamp",
    "format": "output.format",
    "hist_bins": "output.hist_bins",
    "epsilon": "output.epsilon",
    "out": "output.path",
}


def _iso_date(value: str) -> date:
    try:
        return date.fromisoformat(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM-DD, got {value!r}") from exc


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario JSON, or a run manifest to replay")
    common.add_argument("--seed", type=int, help="master seed (unsigned 64-bit)")
    common.add_argument("--steps", type=int, help="number of decisions N")
    common.add_argument("--trajectories", type=int, help="trajectories M")
    common.add_argument("--k", type=float, help="reinforcement mass per decision")
    common.add_argument("--b0", type=float, help="initial high-risk mass")
    common.add_argument("--r0", type=float, help="initial low-risk mass")
    common.add_argument("--rho", type=float, help="per-step bias weight")
    common.add_argument("--group-indicator", type=int, choices=[0, 1], help="R, the bias direction")
    common.add_argument("--clamp", choices=["clamp_unit_interval", "unclamped"])
    common.add_argument("--threads", type=int, help="worker threads (fallback: RDL_THREADS)")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--hist-bins", type=int)
    common.add_argument("--epsilon", type=float, help="extreme-mass threshold in (0, 0.5)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="rdl",
        description="Reinforced decision lab: urn-process risk simulations, scoring and OLS.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", parents=[common], help="sample trajectories")
    simulate.add_argument("--preset", choices=available_presets())

    cohort = sub.add_parser("cohort", parents=[common], help="multi-group simulation and disparity metrics")
    cohort.add_argument("--endpoints-out", help="also write per-member endpoints (group,member,p,successes)")

    analyze = sub.add_parser("analyze", parents=[common], help="limit-law report for endpoints")
    analyze.add_argument("--endpoints", help="CSV with a p column (trajectory CSVs use the last step), or one value per line")

    score = sub.add_parser("score", parents=[common], help="nine-factor risk scores")
    score.add_argument("--events", help="JSON Lines event stream")
    score.add_argument("--table", help="score table JSON (default: synthetic fixture)")
    score.add_argument("--batch", help="JSON Lines of nine-factor records; scores each and summarises")
    score.add_argument("--age", type=int, help="required unless --batch")
    score.add_argument("--as-of", type=_iso_date, help="required unless --batch")
    score.add_argument("--violent-offense", action="store_true")
    score.add_argument("--pending-charge", action="store_true")

    regress = sub.add_parser("regress", parents=[common], help="OLS on a CSV design or synthetic cohort")
    source = regress.add_mutually_exclusive_group()
    source.add_argument("--csv", help="design CSV with header; outcome column 'y'")
    source.add_argument("--scenario", help="synthetic scenario from config/regression.yaml")
    regress.add_argument("--n", type=int, help="override scenario sample size")
    regress.add_argument("--noise-sd", type=float, help="override calibrated noise sd")
    regress.add_argument("--describe", action="store_true", help="append design summary table")
    regress.add_argument("--coverage", type=int, default=0, metavar="SEEDS", help="CI coverage over SEEDS seeds")
    return parser


def _dispatch(args: argparse.Namespace) -> Dict[str, Any]:
    overrides = {path: getattr(args, dest) for dest, path in _OVERRIDES.items()}
    scenario = load_scenario(args.config, overrides, preset=getattr(args, "preset", None))
    threads = resolve_threads(args.threads)
    out = scenario.output.path

    if args.command == "simulate":
        return cmd_simulate(scenario, out=out, manifest=args.manifest, threads=threads, preset=args.preset)
    if args.command == "cohort":
        return cmd_cohort(
            scenario, out=out, manifest=args.manifest, threads=threads, endpoints_out=args.endpoints_out
        )
    if args.command == "analyze":
        return cmd_analyze(scenario, endpoints_path=args.endpoints, out=out, manifest=args.manifest, threads=threads)
    if args.command == "score":
        return cmd_score(
            scenario,
            age=args.age,
            as_of=args.as_of,
            events_path=args.events,
            table_path=args.table,
            violent_offense=args.violent_offense,
            pending_charge=args.pending_charge,
            out=out,
            manifest=args.manifest,
            batch_path=args.batch,
        )
    return cmd_regress(
        scenario,
        csv_path=args.csv,
        scenario_name=args.scenario,
        n=args.n,
        noise_sd=args.noise_sd,
        describe=args.describe,
        coverage_seeds=args.coverage,
        out=out,
        manifest=args.manifest,
        threads=threads,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(list(argv) if argv is not None else None)
    run_id = new_trace()
    logger.info("cli_start", command=args.command, run_id=run_id)

    try:
        _dispatch(args)
    except (LinAlgError, ArithmeticError, RuntimeError) as exc:
        return _fail(args.command, exc, EXIT_RUNTIME)
    except ValueError as exc:
        # 含 pydantic ValidationError 与 ConfigValidationError
        return _fail(args.command, exc, EXIT_VALIDATION)
    except OSError as exc:
        return _fail(args.command, exc, EXIT_IO)

    logger.info("cli_done", command=args.command)
    return EXIT_OK


def _fail(command: str, exc: BaseException, code: int) -> int:
    print(f"error: {exc}", file=sys.stderr)
    logger.error("cli_failed", command=command, exit_code=code, error=type(exc).__name__)
    return code


def run() -> None:
    sys.exit(main())


__all__ = ["EXIT_IO", "EXIT_OK", "EXIT_RUNTIME", "EXIT_VALIDATION", "build_parser", "main", "run"]
