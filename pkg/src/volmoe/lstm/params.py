"""LSTM parameter container with a flat float64 layout.

All weights live in one contiguous vector so the optimizer, the gradient
checker, and the checkpoint format share a single declared order:

    W_f, W_i, W_C, W_o   each hidden x (hidden + input), row-major
    b_f, b_i, b_C, b_o   each hidden
    W_out                hidden (dense head)
    b_out                scalar

The four gate matrices are exposed both individually and as one stacked
``(4*hidden, hidden+input)`` view, which is what the batch kernels consume.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameterError
from ..numkit import RngStream

GATE_ORDER = ("f", "i", "c", "o")


def n_params(hidden: int, input_size: int) -> int:
    return 4 * hidden * (hidden + input_size) + 4 * hidden + hidden + 1


@dataclass
class LstmParams:
    hidden_size: int
    input_size: int
    flat: np.ndarray

    def __post_init__(self):
        expected = n_params(self.hidden_size, self.input_size)
        if self.flat.shape != (expected,):
            raise InvalidParameterError(
                f"flat vector has shape {self.flat.shape}, expected ({expected},)"
            )

    # -- stacked views used by the batch kernels ---------------------------
    @property
    def w_gates(self) -> np.ndarray:
        h, k = self.hidden_size, self.hidden_size + self.input_size
        return self.flat[: 4 * h * k].reshape(4 * h, k)

    @property
    def b_gates(self) -> np.ndarray:
        h, k = self.hidden_size, self.hidden_size + self.input_size
        start = 4 * h * k
        return self.flat[start : start + 4 * h]

    @property
    def w_out(self) -> np.ndarray:
        h = self.hidden_size
        return self.flat[-(h + 1) : -1]

    @property
    def b_out(self) -> float:
        return float(self.flat[-1])

    # -- per-gate views -----------------------------------------------------
    def _gate(self, index: int) -> np.ndarray:
        h = self.hidden_size
        return self.w_gates[index * h : (index + 1) * h]

    @property
    def W_f(self) -> np.ndarray:
        return self._gate(0)

    @property
    def W_i(self) -> np.ndarray:
        return self._gate(1)

    @property
    def W_C(self) -> np.ndarray:
        return self._gate(2)

    @property
    def W_o(self) -> np.ndarray:
        return self._gate(3)

    @property
    def b_f(self) -> np.ndarray:
        return self.b_gates[: self.hidden_size]

    @property
    def b_i(self) -> np.ndarray:
        return self.b_gates[self.hidden_size : 2 * self.hidden_size]

    @property
    def b_C(self) -> np.ndarray:
        return self.b_gates[2 * self.hidden_size : 3 * self.hidden_size]

    @property
    def b_o(self) -> np.ndarray:
        return self.b_gates[3 * self.hidden_size :]

    def copy(self) -> "LstmParams":
        return LstmParams(self.hidden_size, self.input_size, self.flat.copy())

    def check_finite(self) -> None:
        if not np.all(np.isfinite(self.flat)):
            raise InvalidParameterError("parameters contain non-finite entries")


@dataclass
class LstmState:
    h: np.ndarray
    c: np.ndarray


def zero_state(hidden: int) -> LstmState:
    return LstmState(h=np.zeros(hidden), c=np.zeros(hidden))


def init_params(hidden: int, input_size: int, rng: RngStream) -> LstmParams:
    """Glorot-uniform gate weights, zero biases except forget bias = 1.

    The forget-gate bias of 1 keeps the cell state open early in training,
    which matters for the short runs used here. Draw order is pinned: all
    gate weights (stacked row-major), then the output weights.
    """
    if hidden < 1 or input_size < 1:
        raise InvalidParameterError(
            f"hidden and input sizes must be >= 1, got {hidden} and {input_size}"
        )
    k = hidden + input_size
    flat = np.zeros(n_params(hidden, input_size))
    params = LstmParams(hidden_size=hidden, input_size=input_size, flat=flat)

    gate_bound = np.sqrt(6.0 / (k + hidden))
    u = rng.next_u64_array(4 * hidden * k)
    draws = (u >> np.uint64(11)).astype(np.float64) * 2.0**-53
    params.w_gates[:] = ((2.0 * draws - 1.0) * gate_bound).reshape(4 * hidden, k)

    out_bound = np.sqrt(6.0 / (hidden + 1))
    u = rng.next_u64_array(hidden)
    draws = (u >> np.uint64(11)).astype(np.float64) * 2.0**-53
    params.w_out[:] = (2.0 * draws - 1.0) * out_bound

    params.b_f[:] = 1.0
    return params
