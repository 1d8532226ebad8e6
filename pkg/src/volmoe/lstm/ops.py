"""Reference single-sample LSTM operations.

These are the readable definitions of the cell step, the unrolled forward
pass, and backpropagation through time. Training goes through the batch
kernels in ``backends``; tests hold the two implementations against each
other and against finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError, NumericOverflowError
from .params import LstmParams, LstmState, n_params, zero_state


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0.0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass
class StepCache:
    """Every intermediate of one cell step, as needed by the backward pass."""

    z: np.ndarray       # concatenated [h_prev, x_t]
    f: np.ndarray
    i: np.ndarray
    g: np.ndarray       # candidate cell value tanh(W_C z + b_C)
    o: np.ndarray
    c_prev: np.ndarray
    c: np.ndarray
    tanh_c: np.ndarray

    @property
    def h(self) -> np.ndarray:
        return self.o * self.tanh_c


def cell_forward(
    params: LstmParams, x_t, state: LstmState
) -> tuple[LstmState, StepCache]:
    """One cell step: forget/input/candidate/output gates, then the state
    update c = f*c_prev + i*g and h = o*tanh(c)."""
    x_t = np.atleast_1d(np.asarray(x_t, dtype=np.float64))
    if x_t.shape != (params.input_size,):
        raise DimensionError(
            f"input has shape {x_t.shape}, expected ({params.input_size},)"
        )
    hidden = params.hidden_size
    z = np.concatenate([state.h, x_t])
    gates = params.w_gates @ z + params.b_gates
    f = _sigmoid(gates[:hidden])
    i = _sigmoid(gates[hidden : 2 * hidden])
    g = np.tanh(gates[2 * hidden : 3 * hidden])
    o = _sigmoid(gates[3 * hidden :])
    c = f * state.c + i * g
    tanh_c = np.tanh(c)
    h = o * tanh_c
    if not (np.all(np.isfinite(c)) and np.all(np.isfinite(h))):
        raise NumericOverflowError("non-finite cell state")
    cache = StepCache(z=z, f=f, i=i, g=g, o=o, c_prev=state.c.copy(), c=c, tanh_c=tanh_c)
    return LstmState(h=h, c=c), cache


def network_forward(params: LstmParams, window) -> tuple[float, list[StepCache]]:
    """Run the cell over a window from a zero state; dense head on final h."""
    window = np.asarray(window, dtype=np.float64)
    if window.ndim == 1:
        window = window[:, None]
    if window.ndim != 2 or window.shape[1] != params.input_size or window.shape[0] < 1:
        raise DimensionError(
            f"window has shape {window.shape}, expected (steps, {params.input_size})"
        )
    state = zero_state(params.hidden_size)
    caches = []
    for t in range(window.shape[0]):
        state, cache = cell_forward(params, window[t], state)
        caches.append(cache)
    prediction = float(params.w_out @ state.h + params.b_out)
    return prediction, caches


def mse_loss(preds, targets) -> float:
    preds = np.asarray(preds, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if preds.shape != targets.shape or preds.size == 0:
        raise DimensionError(
            f"predictions {preds.shape} vs targets {targets.shape}"
        )
    diff = preds - targets
    return float(np.mean(diff * diff))


def backward(params: LstmParams, batch_caches: list[list[StepCache]], targets) -> np.ndarray:
    """Gradient of the batch-mean MSE with respect to the flat parameters.

    ``batch_caches`` holds one cache list per sample, as produced by
    network_forward on the same parameters.
    """
    targets = np.asarray(targets, dtype=np.float64)
    if len(batch_caches) != targets.size or targets.size == 0:
        raise DimensionError(
            f"{len(batch_caches)} cached samples vs {targets.size} targets"
        )
    hidden = params.hidden_size
    n = len(batch_caches)

    d_w_gates = np.zeros_like(params.w_gates)
    d_b_gates = np.zeros_like(params.b_gates)
    d_w_out = np.zeros(hidden)
    d_b_out = 0.0

    for caches, target in zip(batch_caches, targets):
        h_final = caches[-1].h
        pred = float(params.w_out @ h_final + params.b_out)
        d_pred = 2.0 * (pred - target) / n
        d_w_out += d_pred * h_final
        d_b_out += d_pred
        d_h = d_pred * params.w_out
        d_c = np.zeros(hidden)
        for cache in reversed(caches):
            d_o = d_h * cache.tanh_c
            d_c = d_c + d_h * cache.o * (1.0 - cache.tanh_c**2)
            d_gates = np.concatenate(
                [
                    (d_c * cache.c_prev) * cache.f * (1.0 - cache.f),
                    (d_c * cache.g) * cache.i * (1.0 - cache.i),
                    (d_c * cache.i) * (1.0 - cache.g**2),
                    d_o * cache.o * (1.0 - cache.o),
                ]
            )
            d_w_gates += np.outer(d_gates, cache.z)
            d_b_gates += d_gates
            d_z = d_gates @ params.w_gates
            d_h = d_z[:hidden]
            d_c = d_c * cache.f

    grads = np.empty(n_params(hidden, params.input_size))
    k = params.w_gates.size
    grads[:k] = d_w_gates.ravel()
    grads[k : k + 4 * hidden] = d_b_gates
    grads[k + 4 * hidden : k + 5 * hidden] = d_w_out
    grads[-1] = d_b_out
    return grads
