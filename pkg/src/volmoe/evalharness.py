"""Walk-forward validation engine and error metrics.

One fold trains everything on days [1, train_end] and predicts every
company one day ahead across the validation block. Three models are
evaluated per fold:

* ``rnn``    - one LSTM trained on the pooled windows of all companies;
* ``linear`` - one OLS fit pooled over all companies' training rows;
* ``moe``    - gate-weighted blend of the linear expert and an LSTM expert
  trained on the volatile pool (or reusing the pooled baseline when
  ``gate.rnn_expert_pool`` is "all" or the volatile pool is empty).

No parameter fit for a fold reads any price past its training end; the
validation-day windows use observed history (teacher forcing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig
from .errors import ConfigError, DimensionError, ReportError
from .linear import LinearParams
from .linear import fit as linear_fit
from .linear import predict as linear_predict
from .lstm import LstmParams, TrainHistory, backends, make_windows, train
from .moe import GateConfig, gate_weights
from .numkit import Standardizer, fit_standardizer, rng_new
from .simdata import Dataset, VolatilityClass

MODELS = ("rnn", "linear", "moe")
CLASS_GROUPS = ("stable", "volatile", "all")
HORIZON_ORDER = ("1m", "6m", "12m", "12m+")


@dataclass(frozen=True)
class FoldSpec:
    index: int
    train_start: int
    train_end: int
    valid_start: int
    valid_end: int

    @property
    def train_days(self) -> int:
        return self.train_end - self.train_start + 1

    @property
    def valid_days(self) -> range:
        return range(self.valid_start, self.valid_end + 1)


def walk_forward_splits(
    total_days: int, init_train: int, val_len: int, step: int
) -> list[FoldSpec]:
    """Expanding-window folds: train [1, e], valid [e+1, e+v], e growing by
    ``step`` while the validation block still fits."""
    if init_train < 1 or val_len < 1 or step < 1:
        raise ConfigError(
            "walkforward", f"init_train={init_train}, val_len={val_len}, step={step} "
            "must all be >= 1",
        )
    if init_train + val_len > total_days:
        raise ConfigError(
            "walkforward.init_train",
            f"first validation window [{init_train + 1}, {init_train + val_len}] "
            f"exceeds {total_days} days",
        )
    folds = []
    train_end = init_train
    while train_end + val_len <= total_days:
        folds.append(
            FoldSpec(
                index=len(folds),
                train_start=1,
                train_end=train_end,
                valid_start=train_end + 1,
                valid_end=train_end + val_len,
            )
        )
        train_end += step
    return folds


def mse(preds, actuals) -> float:
    preds = np.asarray(preds, dtype=np.float64)
    actuals = np.asarray(actuals, dtype=np.float64)
    if preds.shape != actuals.shape or preds.size == 0:
        raise DimensionError(f"predictions {preds.shape} vs actuals {actuals.shape}")
    diff = preds - actuals
    return float(np.mean(diff * diff))


def rmse(preds, actuals) -> float:
    return math.sqrt(mse(preds, actuals))


def mae(preds, actuals) -> float:
    preds = np.asarray(preds, dtype=np.float64)
    actuals = np.asarray(actuals, dtype=np.float64)
    if preds.shape != actuals.shape or preds.size == 0:
        raise DimensionError(f"predictions {preds.shape} vs actuals {actuals.shape}")
    return float(np.mean(np.abs(preds - actuals)))


# 21 trading days per month; buckets past the data are simply never emitted.
_HORIZON_BOUNDS = ((21, "1m"), (126, "6m"), (252, "12m"))


def horizon_bucket(days_ahead: int) -> str:
    """Label for how far past the training end a prediction falls."""
    if days_ahead < 1:
        raise DimensionError(f"days_ahead must be >= 1, got {days_ahead}")
    for bound, label in _HORIZON_BOUNDS:
        if days_ahead <= bound:
            return label
    return "12m+"


@dataclass(frozen=True)
class PredictionRecord:
    company_id: int
    fold: int
    day: int
    actual: float
    y_rnn: float
    y_lm: float
    y_moe: float
    vol_class: VolatilityClass


@dataclass(frozen=True)
class MetricsCell:
    model: str
    class_group: str
    horizon: str
    n: int
    mse: float
    rmse: float
    mae: float


@dataclass
class FoldSummary:
    fold: int
    train_range: tuple[int, int]
    valid_range: tuple[int, int]
    linear_params: LinearParams
    baseline_epochs: int
    expert_epochs: int
    expert_reused: bool


@dataclass
class MetricsReport:
    cells: list[MetricsCell]
    folds: list[FoldSummary]
    config: dict
    master_seed: int
    shuffle_seed: int
    backend: str
    warnings: list[str] = field(default_factory=list)
    n_records: int = 0

    def cell(self, model: str, class_group: str, horizon: str) -> MetricsCell:
        for cell in self.cells:
            if (
                cell.model == model
                and cell.class_group == class_group
                and cell.horizon == horizon
            ):
                return cell
        raise ReportError(f"no cell for ({model}, {class_group}, {horizon})")

    def validate(self) -> None:
        for cell in self.cells:
            if cell.n <= 0:
                raise ReportError(f"cell {cell} reported with n <= 0")
            if abs(cell.rmse**2 - cell.mse) > 1e-9 * max(cell.mse, 1e-300):
                raise ReportError(f"cell {cell} violates rmse^2 == mse")
            if cell.mae > cell.rmse * (1.0 + 1e-12):
                raise ReportError(f"cell {cell} violates mae <= rmse")


@dataclass
class FoldModels:
    fold: FoldSpec
    standardizers: list[Standardizer]
    baseline: LstmParams
    baseline_history: TrainHistory
    expert: LstmParams
    expert_history: TrainHistory | None
    expert_reused: bool
    linear_params: LinearParams
    warnings: list[str] = field(default_factory=list)


def fit_fold_models(
    ds: Dataset, fold: FoldSpec, cfg: ExperimentConfig, backend: str | None = None
) -> FoldModels:
    """Fit everything one fold needs, reading only its training days.

    Training randomness comes from two shuffle-seed streams per fold:
    stream 2*fold for the pooled baseline, 2*fold + 1 for the MoE expert.
    """
    if fold.train_days < cfg.lstm.window + 1:
        raise ConfigError(
            "walkforward.init_train",
            f"fold {fold.index} trains on {fold.train_days} days; need at least "
            f"window+1 = {cfg.lstm.window + 1}",
        )
    shuffle_seed = cfg.seeds.resolved_shuffle_seed
    train_cfg = cfg.lstm.train_config()
    train_range = (fold.train_start, fold.train_end)
    warnings_out: list[str] = []

    standardizers = [
        fit_standardizer(series.prices[fold.train_start - 1 : fold.train_end])
        for series in ds.series
    ]

    all_windows = []
    volatile_windows = []
    for company, series, std in zip(ds.companies, ds.series, standardizers):
        samples = make_windows(series, train_range, std, cfg.lstm.window)
        all_windows.extend(samples)
        if company.vol_class is VolatilityClass.VOLATILE:
            volatile_windows.extend(samples)

    baseline, baseline_history = train(
        all_windows,
        train_cfg,
        rng_new(shuffle_seed, 2 * fold.index),
        hidden_size=cfg.lstm.hidden,
        backend=backend,
    )

    expert_reused = False
    expert_history: TrainHistory | None = None
    if cfg.gate.rnn_expert_pool == "all":
        expert = baseline
        expert_reused = True
    elif not volatile_windows:
        expert = baseline
        expert_reused = True
        warnings_out.append(
            f"fold {fold.index}: volatile pool is empty; "
            "MoE reuses the pooled baseline LSTM"
        )
    else:
        expert, expert_history = train(
            volatile_windows,
            train_cfg,
            rng_new(shuffle_seed, 2 * fold.index + 1),
            hidden_size=cfg.lstm.hidden,
            backend=backend,
        )

    rows = [
        (day, company.sigma, series.prices[day - 1])
        for company, series in zip(ds.companies, ds.series)
        for day in range(fold.train_start, fold.train_end + 1)
    ]
    linear_params = linear_fit(rows)

    return FoldModels(
        fold=fold,
        standardizers=standardizers,
        baseline=baseline,
        baseline_history=baseline_history,
        expert=expert,
        expert_history=expert_history,
        expert_reused=expert_reused,
        linear_params=linear_params,
        warnings=warnings_out,
    )


def _fold_predictions(
    ds: Dataset,
    models: FoldModels,
    gate: GateConfig,
    window: int,
    backend_name: str,
) -> list[PredictionRecord]:
    kernel = backends.get_backend(backend_name)
    fold = models.fold
    n = ds.n_companies
    means = np.array([s.mean for s in models.standardizers])
    sds = np.array([s.stddev for s in models.standardizers])
    weights = [gate_weights(c.vol_class, gate) for c in ds.companies]
    w_rnn = np.array([w.w_rnn for w in weights])
    w_lm = np.array([w.w_lm for w in weights])
    sigmas = np.array([c.sigma for c in ds.companies])

    records = []
    for day in fold.valid_days:
        raw = np.stack([s.prices[day - 1 - window : day - 1] for s in ds.series])
        X = np.ascontiguousarray(
            ((raw - means[:, None]) / sds[:, None])[:, :, None]
        )
        base_std = kernel.batch_forward(
            models.baseline.w_gates,
            models.baseline.b_gates,
            models.baseline.w_out,
            models.baseline.b_out,
            X,
        )
        y_rnn = base_std * sds + means
        if models.expert_reused:
            y_expert = y_rnn
        else:
            expert_std = kernel.batch_forward(
                models.expert.w_gates,
                models.expert.b_gates,
                models.expert.w_out,
                models.expert.b_out,
                X,
            )
            y_expert = expert_std * sds + means
        y_lm = (
            models.linear_params.beta0
            + models.linear_params.beta1 * day
            + models.linear_params.beta2 * sigmas
        )
        y_moe = w_rnn * y_expert + w_lm * y_lm
        for i in range(n):
            records.append(
                PredictionRecord(
                    company_id=ds.companies[i].company_id,
                    fold=fold.index,
                    day=day,
                    actual=float(ds.series[i].prices[day - 1]),
                    y_rnn=float(y_rnn[i]),
                    y_lm=float(y_lm[i]),
                    y_moe=float(y_moe[i]),
                    vol_class=ds.companies[i].vol_class,
                )
            )
    return records


def aggregate_metrics(
    records: list[PredictionRecord], folds: list[FoldSpec]
) -> list[MetricsCell]:
    """Cells per model x class group x horizon bucket; empty cells are
    omitted, never zero-filled."""
    train_end = {f.index: f.train_end for f in folds}
    cells = []
    for model in MODELS:
        attr = {"rnn": "y_rnn", "linear": "y_lm", "moe": "y_moe"}[model]
        for class_group in CLASS_GROUPS:
            if class_group == "all":
                subset = records
            else:
                subset = [r for r in records if r.vol_class.value == class_group]
            by_horizon: dict[str, list[PredictionRecord]] = {}
            for r in subset:
                bucket = horizon_bucket(r.day - train_end[r.fold])
                by_horizon.setdefault(bucket, []).append(r)
            for horizon in HORIZON_ORDER:
                if horizon not in by_horizon:
                    continue
                group = by_horizon[horizon]
                preds = np.array([getattr(r, attr) for r in group])
                actuals = np.array([r.actual for r in group])
                cell_mse = mse(preds, actuals)
                cells.append(
                    MetricsCell(
                        model=model,
                        class_group=class_group,
                        horizon=horizon,
                        n=len(group),
                        mse=cell_mse,
                        rmse=math.sqrt(cell_mse),
                        mae=mae(preds, actuals),
                    )
                )
    return cells


def class_errors(records: list[PredictionRecord], model: str, class_group: str) -> dict:
    """Horizon-pooled mse/mae for one model on one class group."""
    attr = {"rnn": "y_rnn", "linear": "y_lm", "moe": "y_moe"}[model]
    if class_group == "all":
        subset = records
    else:
        subset = [r for r in records if r.vol_class.value == class_group]
    if not subset:
        raise DimensionError(f"no records for class group {class_group!r}")
    preds = np.array([getattr(r, attr) for r in subset])
    actuals = np.array([r.actual for r in subset])
    return {"mse": mse(preds, actuals), "mae": mae(preds, actuals), "n": len(subset)}


def run_experiment(
    ds: Dataset,
    cfg: ExperimentConfig,
    backend: str | None = None,
    model_sink: list[FoldModels] | None = None,
) -> tuple[MetricsReport, list[PredictionRecord]]:
    """Full walk-forward evaluation of the three models on one dataset.

    Pass a list as ``model_sink`` to also receive the fitted per-fold
    models (used by the CLI to write checkpoints).
    """
    cfg.validate()
    ds.validate()
    backend_name = backend or backends.default_backend_name()
    folds = walk_forward_splits(
        ds.days,
        cfg.walkforward.init_train,
        cfg.walkforward.val_len,
        cfg.walkforward.step,
    )
    gate = cfg.gate.gate_config(ds.config.sigma_threshold)

    records: list[PredictionRecord] = []
    summaries: list[FoldSummary] = []
    all_warnings: list[str] = []
    for fold in folds:
        models = fit_fold_models(ds, fold, cfg, backend=backend_name)
        if model_sink is not None:
            model_sink.append(models)
        all_warnings.extend(models.warnings)
        records.extend(
            _fold_predictions(ds, models, gate, cfg.lstm.window, backend_name)
        )
        summaries.append(
            FoldSummary(
                fold=fold.index,
                train_range=(fold.train_start, fold.train_end),
                valid_range=(fold.valid_start, fold.valid_end),
                linear_params=models.linear_params,
                baseline_epochs=models.baseline_history.epochs_run,
                expert_epochs=(
                    models.expert_history.epochs_run if models.expert_history else 0
                ),
                expert_reused=models.expert_reused,
            )
        )

    report = MetricsReport(
        cells=aggregate_metrics(records, folds),
        folds=summaries,
        config=cfg.to_dict(),
        master_seed=cfg.seeds.master_seed,
        shuffle_seed=cfg.seeds.resolved_shuffle_seed,
        backend=backend_name,
        warnings=all_warnings,
        n_records=len(records),
    )
    report.validate()
    return report, records
