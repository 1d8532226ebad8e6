"""Linear expert: pooled OLS of price on day index and volatility."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, SingularSystemError
from .numkit import solve_least_squares


@dataclass(frozen=True)
class LinearParams:
    """price = beta0 + beta1 * day + beta2 * sigma."""

    beta0: float
    beta1: float
    beta2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.beta0, self.beta1, self.beta2])


def fit(rows) -> LinearParams:
    """OLS over (day, sigma, price) rows on the design [1, day, sigma].

    Needs at least two distinct days and two distinct volatilities; a
    single pooled sigma makes the design rank deficient.
    """
    data = np.asarray(list(rows), dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != 3:
        raise InvalidParameterError("rows must be (day, sigma, price) triples")
    if data.shape[0] < 3:
        raise InvalidParameterError(f"need >= 3 rows, got {data.shape[0]}")
    design = np.column_stack([np.ones(data.shape[0]), data[:, 0], data[:, 1]])
    try:
        beta = solve_least_squares(design, data[:, 2])
    except SingularSystemError as exc:
        raise SingularSystemError(
            f"{exc} (constant day or volatility column; drop the offending regressor)"
        ) from exc
    return LinearParams(beta0=float(beta[0]), beta1=float(beta[1]), beta2=float(beta[2]))


def predict(params: LinearParams, day: float, sigma: float) -> float:
    return params.beta0 + params.beta1 * day + params.beta2 * sigma
