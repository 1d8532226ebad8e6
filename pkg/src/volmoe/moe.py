"""Volatility-keyed gate: per-class expert weights and the convex
combination of the two expert predictions."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linear
from .errors import InvalidParameterError
from .lstm import LstmParams, predict_next
from .numkit import Standardizer
from .simdata import CompanyProfile, VolatilityClass


@dataclass(frozen=True)
class GateWeights:
    w_rnn: float
    w_lm: float

    def __post_init__(self):
        if not (np.isfinite(self.w_rnn) and np.isfinite(self.w_lm)):
            raise InvalidParameterError("gate weights must be finite")
        if self.w_rnn < 0.0 or self.w_lm < 0.0:
            raise InvalidParameterError(
                f"gate weights must be >= 0, got ({self.w_rnn}, {self.w_lm})"
            )
        if abs(self.w_rnn + self.w_lm - 1.0) > 1e-12:
            raise InvalidParameterError(
                f"gate weights must sum to 1, got {self.w_rnn + self.w_lm!r}"
            )


@dataclass(frozen=True)
class GateConfig:
    weights_volatile: GateWeights = field(default_factory=lambda: GateWeights(0.7, 0.3))
    weights_stable: GateWeights = field(default_factory=lambda: GateWeights(0.3, 0.7))
    threshold: float = 0.05


def gate_weights(vol_class: VolatilityClass, cfg: GateConfig) -> GateWeights:
    """Static rule-based gate: one weight pair per volatility class."""
    if vol_class is VolatilityClass.VOLATILE:
        return cfg.weights_volatile
    return cfg.weights_stable


def combine(w: GateWeights, y_rnn: float, y_lm: float) -> float:
    return w.w_rnn * y_rnn + w.w_lm * y_lm


@dataclass(frozen=True)
class MoePrediction:
    y_moe: float
    y_rnn: float
    y_lm: float
    weights: GateWeights


def predict_company(
    rnn_params: LstmParams,
    linear_params: linear.LinearParams,
    company: CompanyProfile,
    window_prices,
    target_day: int,
    cfg: GateConfig,
    standardizer: Standardizer,
    backend: str | None = None,
) -> MoePrediction:
    """Both expert predictions for one company and day, plus their gated
    combination; all values are returned for attribution."""
    y_rnn = predict_next(rnn_params, window_prices, standardizer, backend)
    y_lm = linear.predict(linear_params, target_day, company.sigma)
    weights = gate_weights(company.vol_class, cfg)
    return MoePrediction(
        y_moe=combine(weights, y_rnn, y_lm), y_rnn=y_rnn, y_lm=y_lm, weights=weights
    )
