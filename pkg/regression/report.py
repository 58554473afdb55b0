from __future__ import annotations

"""
回归结果的输出与设计矩阵读写。

文本表格沿用期刊表格的排版：系数后附显著性星号，下一行括号内为标准误，
表尾列出 N、R²、调整 R²、F 统计量与星号图例。
"""

import csv
import io
import json
import math
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from logger.logger import get_logger
from .ols import DesignMatrix, RegressionResult, significance_stars

logger = get_logger(__name__)

STAR_LEGEND = "* p<.1, ** p<.05, *** p<.01"


def _fmt(value: float, digits: int = 4) -> str:
    if not math.isfinite(value):
        return "n/a"
    return f"{value:.{digits}f}"


def format_table(result: RegressionResult, title: Optional[str] = None, digits: int = 4) -> str:
    label_width = max(len(c) for c in result.columns) + 2
    lines: List[str] = []
    if title:
        lines.append(title)
    rule = "-" * (label_width + 20)
    lines.append(rule)
    for i, name in enumerate(result.columns):
        stars = significance_stars(float(result.p_values[i]))
        lines.append(f"{name:<{label_width}}{_fmt(float(result.beta[i]), digits):>14}{stars}")
        lines.append(f"{'':<{label_width}}{'(' + _fmt(float(result.se[i]), digits) + ')':>14}")
    lines.append(rule)
    lines.append(f"{'N':<{label_width}}{result.n:>14}")
    lines.append(f"{'R-squared':<{label_width}}{_fmt(result.r_squared):>14}")
    lines.append(f"{'Adj. R-squared':<{label_width}}{_fmt(result.adj_r_squared):>14}")
    lines.append(f"{'F-statistic':<{label_width}}{_fmt(result.f_stat, 2):>14}")
    lines.append(rule)
    lines.append("Standard errors in parentheses")
    lines.append(STAR_LEGEND)
    return "\n".join(lines) + "\n"


def result_to_json(result: RegressionResult) -> str:
    return json.dumps(result.to_dict(), indent=2, sort_keys=False)


# ---------------------------------------------------------------------- #
# 设计矩阵
# ---------------------------------------------------------------------- #

def describe_design(design: DesignMatrix) -> Dict[str, Dict[str, float]]:
    """
    每列的 count / mean / std / min / 25% / 50% / 75% / max。
    """
    summary: Dict[str, Dict[str, float]] = {}
    for i, name in enumerate(design.columns):
        col = design.values[:, i]
        q25, q50, q75 = np.percentile(col, [25, 50, 75])
        summary[name] = {
            "count": float(col.size),
            "mean": float(col.mean()),
            "std": float(col.std(ddof=1)) if col.size > 1 else 0.0,
            "min": float(col.min()),
            "25%": float(q25),
            "50%": float(q50),
            "75%": float(q75),
            "max": float(col.max()),
        }
    return summary


def format_describe(summary: Dict[str, Dict[str, float]], digits: int = 3) -> str:
    stats = ["count", "mean", "std", "min", "25%", "50%", "75%", "max"]
    label_width = max(len(name) for name in summary) + 2
    header = f"{'':<{label_width}}" + "".join(f"{s:>12}" for s in stats)
    lines = [header]
    for name, row in summary.items():
        lines.append(f"{name:<{label_width}}" + "".join(f"{row[s]:>12.{digits}f}" for s in stats))
    return "\n".join(lines) + "\n"


def read_design_csv(
    source: Union[str, Path, io.TextIOBase], outcome: str = "y", intercept: bool = True
) -> Tuple[DesignMatrix, np.ndarray]:
    """
    读取带表头的 CSV：outcome 列为 Y，其余列为协变量；intercept 为真且表中无 intercept 列时自动补常数列。
    """
    if isinstance(source, (str, Path)):
        with Path(source).open("r", encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
        origin = str(source)
    else:
        rows = list(csv.reader(source))
        origin = "<stream>"

    rows = [r for r in rows if r]
    if not rows:
        raise ValueError(f"design CSV {origin} is empty; a header row is required")
    header = [h.strip() for h in rows[0]]
    if outcome not in header:
        raise ValueError(f"design CSV {origin} has no outcome column {outcome!r}; header={header}")

    body: List[List[float]] = []
    for line_number, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ValueError(
                f"design CSV {origin} line {line_number}: expected {len(header)} fields, got {len(row)}"
            )
        try:
            body.append([float(v) for v in row])
        except ValueError as exc:
            raise ValueError(f"design CSV {origin} line {line_number}: {exc}") from exc
    if not body:
        raise ValueError(f"design CSV {origin} has a header but no data rows")

    matrix = np.array(body, dtype=np.float64)
    y_idx = header.index(outcome)
    y = matrix[:, y_idx]
    data = {name: matrix[:, j] for j, name in enumerate(header) if j != y_idx}
    design = DesignMatrix.from_columns(data, intercept=intercept)
    logger.info("read_design_csv", source=origin, n=design.n, p=design.p)
    return design, y


def write_design_csv(path: Union[str, Path], design: DesignMatrix, y: np.ndarray, outcome: str = "y") -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\r\n")
        writer.writerow([outcome, *design.columns])
        for value, row in zip(y, design.values):
            writer.writerow(["%.17g" % value, *("%.17g" % v for v in row)])


__all__ = [
    "STAR_LEGEND",
    "describe_design",
    "format_describe",
    "format_table",
    "read_design_csv",
    "result_to_json",
    "write_design_csv",
]
