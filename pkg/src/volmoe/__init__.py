"""volmoe: volatility-keyed mixture-of-experts price forecasting.

Generates synthetic daily price series (random walks with drift), trains
an LSTM expert and a pooled linear expert, blends them through a static
volatility-keyed gate, and evaluates all three models walk-forward.
"""

from . import (
    cli,
    config,
    evalharness,
    linear,
    lstm,
    moe,
    numkit,
    reporting,
    simdata,
    study,
)
from .errors import VolmoeError

__version__ = "0.1.0"

__all__ = [
    "VolmoeError",
    "__version__",
    "cli",
    "config",
    "evalharness",
    "linear",
    "lstm",
    "moe",
    "numkit",
    "reporting",
    "simdata",
    "study",
]
