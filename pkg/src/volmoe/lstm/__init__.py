"""From-scratch LSTM regressor: windowing, forward/backward passes,
Adam training with early stopping, and next-day price prediction.

Hot kernels live in ``backends`` (compiled extension with a NumPy twin);
``ops`` holds the readable single-sample reference used by the tests.
"""

from . import backends
from .checkpoint import load_checkpoint, save_checkpoint
from .ops import StepCache, backward, cell_forward, mse_loss, network_forward
from .optim import AdamState, adam_step, clip_global_norm
from .params import LstmParams, LstmState, init_params, n_params, zero_state
from .training import (
    TrainConfig,
    TrainHistory,
    WindowTooShortWarning,
    WindowedSample,
    make_windows,
    predict_next,
    predict_standardized,
    train,
)

__all__ = [
    "AdamState",
    "LstmParams",
    "LstmState",
    "StepCache",
    "TrainConfig",
    "TrainHistory",
    "WindowTooShortWarning",
    "WindowedSample",
    "adam_step",
    "backends",
    "backward",
    "cell_forward",
    "clip_global_norm",
    "init_params",
    "load_checkpoint",
    "make_windows",
    "mse_loss",
    "n_params",
    "network_forward",
    "predict_next",
    "predict_standardized",
    "save_checkpoint",
    "train",
    "zero_state",
]
