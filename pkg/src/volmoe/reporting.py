"""Serialization of experiment outputs and the text report.

All float fields are written with repr(), the shortest exact
representation, so identical runs produce byte-identical files. Nothing
here embeds timestamps.
"""

from __future__ import annotations

import json

from .errors import ReportError
from .evalharness import (
    CLASS_GROUPS,
    HORIZON_ORDER,
    MODELS,
    MetricsReport,
    PredictionRecord,
)

REPORT_FORMAT = "volmoe.report"
REPORT_VERSION = 1

METRICS_HEADER = ("model", "class", "horizon", "n", "mse", "rmse", "mae")
PREDICTIONS_HEADER = (
    "company_id",
    "fold",
    "day",
    "actual",
    "y_rnn",
    "y_lm",
    "y_moe",
    "class",
)

_DISPLAY_NAMES = {"rnn": "RNN", "linear": "Linear", "moe": "MoE"}
_GROUP_TITLES = {
    "stable": "Stable companies",
    "volatile": "Volatile companies",
    "all": "All companies",
}


def _fmt(x: float) -> str:
    return repr(float(x))


def metrics_csv_text(report: MetricsReport) -> str:
    lines = [",".join(METRICS_HEADER)]
    for cell in report.cells:
        lines.append(
            f"{cell.model},{cell.class_group},{cell.horizon},{cell.n},"
            f"{_fmt(cell.mse)},{_fmt(cell.rmse)},{_fmt(cell.mae)}"
        )
    return "\n".join(lines) + "\n"


def write_metrics_csv(report: MetricsReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(metrics_csv_text(report))


def write_predictions_csv(records: list[PredictionRecord], path) -> None:
    lines = [",".join(PREDICTIONS_HEADER)]
    for r in records:
        lines.append(
            f"{r.company_id},{r.fold},{r.day},{_fmt(r.actual)},"
            f"{_fmt(r.y_rnn)},{_fmt(r.y_lm)},{_fmt(r.y_moe)},{r.vol_class.value}"
        )
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def report_to_dict(report: MetricsReport) -> dict:
    return {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "config": report.config,
        "master_seed": report.master_seed,
        "shuffle_seed": report.shuffle_seed,
        "backend": report.backend,
        "warnings": report.warnings,
        "n_records": report.n_records,
        "folds": [
            {
                "fold": f.fold,
                "train": list(f.train_range),
                "valid": list(f.valid_range),
                "baseline_epochs": f.baseline_epochs,
                "expert_epochs": f.expert_epochs,
                "expert_reused": f.expert_reused,
            }
            for f in report.folds
        ],
        "linear_params": [
            {
                "fold": f.fold,
                "beta0": f.linear_params.beta0,
                "beta1": f.linear_params.beta1,
                "beta2": f.linear_params.beta2,
            }
            for f in report.folds
        ],
        "metrics": [
            {
                "model": c.model,
                "class": c.class_group,
                "horizon": c.horizon,
                "n": c.n,
                "mse": c.mse,
                "rmse": c.rmse,
                "mae": c.mae,
            }
            for c in report.cells
        ],
    }


def write_report_json(report: MetricsReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report_to_dict(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_report_dict(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ReportError(f"invalid report JSON: {exc}") from exc
    if raw.get("format") != REPORT_FORMAT or raw.get("version") != REPORT_VERSION:
        raise ReportError(f"unsupported report format {raw.get('format')!r}")
    for key in ("metrics", "config"):
        if key not in raw:
            raise ReportError(f"report is missing the {key!r} section")
    return raw


def _class_rows(raw: dict, class_group: str) -> dict[str, dict]:
    """Horizon-pooled MSE/MAE per model for one class group.

    Pools the per-horizon cells back together via their counts so the text
    table matches class-level metrics regardless of bucketing.
    """
    rows: dict[str, dict] = {}
    for model in MODELS:
        cells = [
            c
            for c in raw["metrics"]
            if c["model"] == model and c["class"] == class_group
        ]
        if not cells:
            continue
        n = sum(c["n"] for c in cells)
        pooled_mse = sum(c["mse"] * c["n"] for c in cells) / n
        pooled_mae = sum(c["mae"] * c["n"] for c in cells) / n
        rows[model] = {"n": n, "mse": pooled_mse, "mae": pooled_mae}
    return rows


def format_text_report(raw: dict) -> str:
    """Aligned per-class tables with one row per model, MSE and MAE columns."""
    out = []
    for class_group in CLASS_GROUPS:
        rows = _class_rows(raw, class_group)
        if not rows:
            continue
        missing = [m for m in MODELS if m not in rows]
        if missing:
            raise ReportError(
                f"class group {class_group!r} is missing model rows: {missing}"
            )
        out.append(f"{_GROUP_TITLES[class_group]} (n={rows['rnn']['n']})")
        out.append(f"  {'Model':<8} {'MSE':>12} {'MAE':>12}")
        for model in MODELS:
            row = rows[model]
            out.append(
                f"  {_DISPLAY_NAMES[model]:<8} {row['mse']:>12.5f} {row['mae']:>12.5f}"
            )
        out.append("")
    if not out:
        raise ReportError("report contains no metric cells")
    return "\n".join(out)


def format_csv_report(raw: dict) -> str:
    """Machine-readable variant of the report table, byte-stable."""
    lines = [",".join(METRICS_HEADER)]
    cells = sorted(
        raw["metrics"],
        key=lambda c: (
            MODELS.index(c["model"]),
            CLASS_GROUPS.index(c["class"]),
            HORIZON_ORDER.index(c["horizon"]),
        ),
    )
    for c in cells:
        lines.append(
            f"{c['model']},{c['class']},{c['horizon']},{c['n']},"
            f"{_fmt(c['mse'])},{_fmt(c['rmse'])},{_fmt(c['mae'])}"
        )
    return "\n".join(lines) + "\n"
