"""
Experiment report rendering
"""
from typing import Dict, List, Optional

import pandas as pd

from splinenet.models.schemas import ExperimentReport, MethodRecord

COLUMNS = ("method", "max_err", "path_norm", "seminorm", "time_s")


def _num(fmt: str):
    def render(value: Optional[float]) -> str:
        return "-" if value is None or pd.isna(value) else fmt % value
    return render


def report_table(records: List[MethodRecord]) -> str:
    """Fixed-width table, one method per row"""
    frame = pd.DataFrame(
        [
            {
                "method": rec.method,
                "max_err": rec.max_error,
                "path_norm": rec.path_norm,
                "seminorm": rec.seminorm,
                "time_s": rec.wall_time,
            }
            for rec in records
        ],
        columns=list(COLUMNS),
    )
    formatters = {
        "method": lambda s: f"{s:<16}",
        "max_err": _num("%.3e"),
        "path_norm": _num("%.6g"),
        "seminorm": _num("%.6g"),
        "time_s": _num("%.2f"),
    }
    return frame.to_string(index=False, formatters=formatters, justify="right")


def oracle_ratios(records: List[MethodRecord]) -> Dict[str, float]:
    """seminorm / oracle seminorm for every non-oracle method with a matching oracle"""
    return {
        rec.method: rec.seminorm / rec.oracle_seminorm
        for rec in records
        if rec.oracle_seminorm and not rec.method.startswith("oracle")
    }


def render_report(report: ExperimentReport) -> str:
    lines = [
        "splinenet experiment report",
        f"dataset: {report.dataset_fingerprint}",
        f"n_points: {report.n_points}",
        "",
        report_table(report.records),
    ]

    ratios = oracle_ratios(report.records)
    if ratios:
        lines += ["", "seminorm / oracle:"]
        lines += [f"  {name}: {ratio:.4f}" for name, ratio in ratios.items()]

    lines += ["", "config:"]
    lines += [f"  {entry}" for entry in report.config]
    return "\n".join(lines) + "\n"
