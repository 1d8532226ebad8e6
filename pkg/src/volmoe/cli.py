"""Command-line front end: generate, evaluate, report.

Everything is driven by the JSON config and the two named seeds; there is
no wall-clock or environment entropy anywhere, so rerunning a command with
the same inputs reproduces its outputs byte for byte.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import reporting
from .config import ExperimentConfig, default_config, load_config
from .errors import ConfigError, VolmoeError
from .evalharness import FoldModels, run_experiment
from .lstm import save_checkpoint
from .simdata import VolatilityClass, export_csv, generate_dataset, import_csv


def _load(config_path: str | None) -> ExperimentConfig:
    if config_path is None:
        return default_config()
    return load_config(config_path)


def _parse_gate_override(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError("--gate-override", f"expected 'w_rnn,w_lm', got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ConfigError("--gate-override", str(exc)) from exc


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = _load(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    cfg.validate()
    out = Path(args.out) if args.out else Path(cfg.output.dir) / "dataset.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    ds = generate_dataset(cfg.dataset, cfg.seeds.master_seed)
    export_csv(ds, out)
    stable = len(ds.by_class(VolatilityClass.STABLE))
    volatile = len(ds.by_class(VolatilityClass.VOLATILE))
    print(
        f"wrote {out}: {ds.n_companies} companies x {ds.days} days "
        f"(stable: {stable}, volatile: {volatile}, master_seed: {ds.master_seed})"
    )
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _load(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    if args.gate_override is not None:
        cfg = cfg.with_gate_override(*_parse_gate_override(args.gate_override))
    cfg.validate()
    ds = import_csv(args.dataset)
    out_dir = Path(args.out) if args.out else Path(cfg.output.dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    models: list[FoldModels] = []
    report, records = run_experiment(ds, cfg, model_sink=models)

    reporting.write_report_json(report, out_dir / "report.json")
    reporting.write_metrics_csv(report, out_dir / "metrics.csv")
    reporting.write_predictions_csv(records, out_dir / "predictions.csv")
    train_cfg = cfg.lstm.train_config()
    for fm in models:
        save_checkpoint(fm.baseline, out_dir / f"baseline_fold{fm.fold.index}.npz", train_cfg)
        save_checkpoint(fm.expert, out_dir / f"expert_fold{fm.fold.index}.npz", train_cfg)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print(
        f"wrote {out_dir}/report.json, metrics.csv, predictions.csv and "
        f"{2 * len(models)} checkpoints ({report.n_records} prediction records, "
        f"backend: {report.backend})"
    )
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    raw = reporting.load_report_dict(args.report)
    if args.format == "csv":
        sys.stdout.write(reporting.format_csv_report(raw))
    else:
        print(reporting.format_text_report(raw))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="volmoe",
        description="Gated mixture of an LSTM and a linear expert on synthetic "
        "daily price series, evaluated walk-forward.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="write a synthetic dataset CSV")
    p_gen.add_argument("--config", help="JSON config path (defaults are built in)")
    p_gen.add_argument("--seed", type=int, help="override seeds.master_seed")
    p_gen.add_argument("--out", help="output CSV path (default <output.dir>/dataset.csv)")
    p_gen.set_defaults(func=cmd_generate)

    p_eval = sub.add_parser("evaluate", help="run the walk-forward evaluation")
    p_eval.add_argument("--config", help="JSON config path (defaults are built in)")
    p_eval.add_argument("--dataset", required=True, help="dataset CSV from 'generate'")
    p_eval.add_argument("--seed", type=int, help="override seeds.master_seed")
    p_eval.add_argument("--out", help="output directory (default from config)")
    p_eval.add_argument(
        "--gate-override",
        metavar="W_RNN,W_LM",
        help="force this weight pair for both volatility classes",
    )
    p_eval.set_defaults(func=cmd_evaluate)

    p_rep = sub.add_parser("report", help="print the per-class metric tables")
    p_rep.add_argument("report", help="report.json produced by 'evaluate'")
    p_rep.add_argument("--format", choices=("text", "csv"), default="text")
    p_rep.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except VolmoeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
