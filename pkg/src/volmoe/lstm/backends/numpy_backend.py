"""Pure-NumPy twin of the compiled LSTM kernels.

Vectorizes over the batch; the time recurrence stays a Python loop. Both
backends implement the same two entry points and the same gate stacking
(rows of ``w_gates`` are forget, input, cell, output blocks), and both
preallocate their slabs and write through ``out=`` so a training batch
costs a fixed, small number of array operations.

The sigmoid is the direct ``1 / (1 + exp(-x))``; an overflowing exp is
harmless (the quotient flushes to exactly 0) so the overflow warning is
suppressed rather than branched around.
"""

from __future__ import annotations

import numpy as np

from ...errors import DimensionError, NumericOverflowError

NAME = "numpy"


def _run_forward(w_gates, b_gates, w_out, b_out, X):
    batch, steps, _ = X.shape
    hidden = w_out.shape[0]
    k = w_gates.shape[1]
    w_gates_t = np.ascontiguousarray(w_gates.T)

    z_all = np.empty((steps, batch, k))
    act_all = np.empty((steps, batch, 4 * hidden))  # f, i, candidate, o
    c_all = np.empty((steps, batch, hidden))
    tc_all = np.empty((steps, batch, hidden))

    gates = np.empty((batch, 4 * hidden))
    h = np.zeros((batch, hidden))
    c = np.zeros((batch, hidden))
    with np.errstate(over="ignore"):
        for t in range(steps):
            z = z_all[t]
            z[:, :hidden] = h
            z[:, hidden:] = X[:, t, :]
            np.matmul(z, w_gates_t, out=gates)
            gates += b_gates
            act = act_all[t]
            # candidate block is tanh, the other three are sigmoids
            np.tanh(gates[:, 2 * hidden : 3 * hidden], out=act[:, 2 * hidden : 3 * hidden])
            for lo, hi in ((0, 2 * hidden), (3 * hidden, 4 * hidden)):
                np.exp(np.negative(gates[:, lo:hi]), out=act[:, lo:hi])
                act[:, lo:hi] += 1.0
                np.reciprocal(act[:, lo:hi], out=act[:, lo:hi])
            f = act[:, :hidden]
            i = act[:, hidden : 2 * hidden]
            g = act[:, 2 * hidden : 3 * hidden]
            o = act[:, 3 * hidden :]
            c = c_all[t]
            np.multiply(f, c_all[t - 1] if t > 0 else 0.0, out=c)
            c += i * g
            np.tanh(c, out=tc_all[t])
            h = o * tc_all[t]
    preds = h @ w_out + b_out
    return preds, (z_all, act_all, c_all, tc_all, h)


def batch_forward(w_gates, b_gates, w_out, b_out, X) -> np.ndarray:
    """Predictions for a batch of windows X with shape (batch, steps, inputs)."""
    preds, _ = _run_forward(w_gates, b_gates, w_out, b_out, X)
    if not np.all(np.isfinite(preds)):
        raise NumericOverflowError("non-finite prediction in forward pass")
    return preds


def batch_loss_grads(w_gates, b_gates, w_out, b_out, X, y):
    """Mean-MSE loss over the batch and its gradient for every parameter.

    Returns ``(loss, d_w_gates, d_b_gates, d_w_out, d_b_out)``.
    """
    batch, steps, _ = X.shape
    hidden = w_out.shape[0]
    if batch == 0 or y.shape != (batch,):
        raise DimensionError(f"batch of {batch} windows vs targets {y.shape}")
    preds, cache = _run_forward(w_gates, b_gates, w_out, b_out, X)
    z_all, act_all, c_all, tc_all, h_final = cache
    if not np.all(np.isfinite(preds)):
        raise NumericOverflowError("non-finite prediction in forward pass")

    resid = preds - y
    loss = float(np.mean(resid * resid))
    d_pred = 2.0 * resid / batch

    d_w_out = h_final.T @ d_pred
    d_b_out = float(d_pred.sum())
    d_h = np.outer(d_pred, w_out)
    d_c = np.zeros((batch, hidden))
    d_w_gates = np.zeros_like(w_gates)
    d_b_gates = np.zeros_like(b_gates)
    d_gates = np.empty((batch, 4 * hidden))
    scratch = np.empty((batch, hidden))

    for t in range(steps - 1, -1, -1):
        act = act_all[t]
        f = act[:, :hidden]
        i = act[:, hidden : 2 * hidden]
        g = act[:, 2 * hidden : 3 * hidden]
        o = act[:, 3 * hidden :]
        tc = tc_all[t]
        # d_c accumulates the head-path term d_h * o * (1 - tc^2)
        np.multiply(tc, tc, out=scratch)
        np.subtract(1.0, scratch, out=scratch)
        scratch *= o
        scratch *= d_h
        d_c += scratch
        if t > 0:
            np.multiply(d_c, c_all[t - 1], out=d_gates[:, :hidden])
        else:
            d_gates[:, :hidden] = 0.0
        d_gates[:, :hidden] *= f
        d_gates[:, :hidden] *= 1.0 - f
        np.multiply(d_c, g, out=d_gates[:, hidden : 2 * hidden])
        d_gates[:, hidden : 2 * hidden] *= i
        d_gates[:, hidden : 2 * hidden] *= 1.0 - i
        np.multiply(d_c, i, out=d_gates[:, 2 * hidden : 3 * hidden])
        d_gates[:, 2 * hidden : 3 * hidden] *= 1.0 - g * g
        np.multiply(d_h, tc, out=d_gates[:, 3 * hidden :])
        d_gates[:, 3 * hidden :] *= o
        d_gates[:, 3 * hidden :] *= 1.0 - o
        d_w_gates += d_gates.T @ z_all[t]
        d_b_gates += d_gates.sum(axis=0)
        d_z = d_gates @ w_gates
        d_h = d_z[:, :hidden]
        d_c *= f

    return loss, d_w_gates, d_b_gates, d_w_out, d_b_out
