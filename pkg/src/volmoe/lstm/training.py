"""Windowing, the training loop with early stopping, and price prediction."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, InvalidParameterError
from ..numkit import RngStream, Standardizer
from ..simdata import PriceSeries
from . import backends
from .optim import AdamState, adam_step, clip_global_norm
from .params import LstmParams, init_params, n_params


class WindowTooShortWarning(UserWarning):
    """A requested day range cannot hold a single window plus target."""


@dataclass(frozen=True)
class WindowedSample:
    inputs: np.ndarray  # standardized prices, one per window day
    target: float       # standardized price at target_day
    company_id: int
    target_day: int


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 50
    batch_size: int = 16
    lr: float = 0.001
    early_stop_patience: int = 5
    min_delta: float = 1e-6
    val_fraction: float = 0.1
    clip_norm: float = 5.0

    def validate(self) -> None:
        if self.epochs < 1:
            raise ConfigError("lstm.epochs", f"must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError("lstm.batch", f"must be >= 1, got {self.batch_size}")
        if not self.lr > 0.0:
            raise ConfigError("lstm.lr", f"must be > 0, got {self.lr}")
        if self.early_stop_patience < 1:
            raise ConfigError(
                "lstm.patience", f"must be >= 1, got {self.early_stop_patience}"
            )
        if not 0.0 <= self.val_fraction < 1.0:
            raise ConfigError(
                "lstm.val_fraction", f"must be in [0, 1), got {self.val_fraction}"
            )
        if not self.clip_norm > 0.0:
            raise ConfigError("lstm.clip_norm", f"must be > 0, got {self.clip_norm}")
        if not self.min_delta >= 0.0:
            raise ConfigError("lstm.min_delta", f"must be >= 0, got {self.min_delta}")


@dataclass
class TrainHistory:
    train_losses: list = field(default_factory=list)
    monitor_losses: list = field(default_factory=list)
    best_epoch: int = 0          # 1-based epoch whose weights were returned
    epochs_run: int = 0
    early_stopped: bool = False
    n_train: int = 0
    n_val: int = 0


def make_windows(
    series: PriceSeries,
    day_range: tuple[int, int],
    standardizer: Standardizer,
    window: int = 10,
) -> list[WindowedSample]:
    """Stride-1 sliding windows fully inside the inclusive day range.

    A range shorter than window + 1 days yields no samples and a
    WindowTooShortWarning rather than an error.
    """
    start, end = day_range
    if start < 1 or end > series.days or start > end:
        raise InvalidParameterError(
            f"day range [{start}, {end}] outside series days [1, {series.days}]"
        )
    if window < 1:
        raise InvalidParameterError(f"window must be >= 1, got {window}")
    if end - start + 1 < window + 1:
        warnings.warn(
            f"range [{start}, {end}] shorter than window+1={window + 1}; no samples",
            WindowTooShortWarning,
            stacklevel=2,
        )
        return []
    samples = []
    for target_day in range(start + window, end + 1):
        raw = series.prices[target_day - 1 - window : target_day - 1]
        samples.append(
            WindowedSample(
                inputs=np.asarray(standardizer.apply(raw)),
                target=float(standardizer.apply(series.prices[target_day - 1])),
                company_id=series.company_id,
                target_day=target_day,
            )
        )
    return samples


def _stack(samples: list[WindowedSample]) -> tuple[np.ndarray, np.ndarray]:
    X = np.ascontiguousarray(
        np.stack([s.inputs for s in samples])[:, :, None], dtype=np.float64
    )
    y = np.array([s.target for s in samples], dtype=np.float64)
    return X, y


def train(
    samples: list[WindowedSample],
    cfg: TrainConfig,
    rng: RngStream,
    hidden_size: int = 50,
    backend: str | None = None,
    initial_params: LstmParams | None = None,
) -> tuple[LstmParams, TrainHistory]:
    """Train on windowed samples with Adam, shuffled mini-batches, and
    early stopping on a held-out fraction of the samples.

    The single rng drives, in order: weight initialization, the holdout
    split, then one shuffle per epoch; fixed seeds give bit-identical runs.
    Returns the weights of the best monitored epoch.
    """
    cfg.validate()
    if not samples:
        raise InvalidParameterError("cannot train on an empty sample list")
    kernel = backends.get_backend(backend)
    window = len(samples[0].inputs)

    if initial_params is None:
        params = init_params(hidden_size, 1, rng)
    else:
        params = initial_params.copy()

    order = rng.permutation(len(samples))
    n_val = int(len(samples) * cfg.val_fraction)
    val_idx, train_idx = order[:n_val], order[n_val:]
    if train_idx.size == 0:
        raise InvalidParameterError("holdout split left no training samples")
    X_all, y_all = _stack(samples)
    X_train, y_train = X_all[train_idx], y_all[train_idx]
    X_val, y_val = X_all[val_idx], y_all[val_idx]

    opt = AdamState.for_params(params, lr=cfg.lr)
    history = TrainHistory(n_train=int(train_idx.size), n_val=int(val_idx.size))
    flat_grads = np.empty(n_params(hidden_size, 1))
    gate_size = params.w_gates.size

    best_monitor = np.inf
    best_flat = params.flat.copy()
    best_epoch = 0
    bad_epochs = 0

    for epoch in range(1, cfg.epochs + 1):
        perm = rng.permutation(train_idx.size)
        loss_sum = 0.0
        for lo in range(0, train_idx.size, cfg.batch_size):
            batch = perm[lo : lo + cfg.batch_size]
            X = np.ascontiguousarray(X_train[batch])
            y = y_train[batch]
            loss, d_wg, d_bg, d_wo, d_bo = kernel.batch_loss_grads(
                params.w_gates, params.b_gates, params.w_out, params.b_out, X, y
            )
            loss_sum += loss * batch.size
            flat_grads[:gate_size] = d_wg.ravel()
            flat_grads[gate_size : gate_size + 4 * hidden_size] = d_bg
            flat_grads[gate_size + 4 * hidden_size : -1] = d_wo
            flat_grads[-1] = d_bo
            clip_global_norm(flat_grads, cfg.clip_norm)
            adam_step(params, flat_grads, opt)
        train_loss = loss_sum / train_idx.size
        history.train_losses.append(train_loss)

        if val_idx.size > 0:
            val_preds = kernel.batch_forward(
                params.w_gates, params.b_gates, params.w_out, params.b_out, X_val
            )
            monitor = float(np.mean((val_preds - y_val) ** 2))
        else:
            monitor = train_loss
        history.monitor_losses.append(monitor)
        history.epochs_run = epoch

        if monitor <= best_monitor - cfg.min_delta:
            best_monitor = monitor
            best_flat = params.flat.copy()
            best_epoch = epoch
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= cfg.early_stop_patience:
                history.early_stopped = True
                break

    if best_epoch == 0:
        # Unreachable: any finite first-epoch loss improves on +inf.
        best_epoch = 1
    history.best_epoch = best_epoch
    params.flat[:] = best_flat
    return params, history


def predict_standardized(
    params: LstmParams, windows_std: np.ndarray, backend: str | None = None
) -> np.ndarray:
    """Standardized predictions for an array of standardized windows
    (n, window) or (n, window, input_size)."""
    kernel = backends.get_backend(backend)
    X = np.asarray(windows_std, dtype=np.float64)
    if X.ndim == 2:
        X = X[:, :, None]
    X = np.ascontiguousarray(X)
    return kernel.batch_forward(
        params.w_gates, params.b_gates, params.w_out, params.b_out, X
    )


def predict_next(
    params: LstmParams,
    last_prices,
    standardizer: Standardizer,
    backend: str | None = None,
) -> float:
    """Next-day price from the trailing window of observed prices."""
    window_std = standardizer.apply(np.asarray(last_prices, dtype=np.float64))
    pred_std = predict_standardized(params, window_std[None, :], backend)[0]
    return float(standardizer.invert(pred_std))
