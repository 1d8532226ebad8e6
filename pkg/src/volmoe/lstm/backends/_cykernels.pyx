# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled LSTM kernels: batch forward pass and fused loss/gradient pass.

Hybrid design: the per-timestep matmuls and transcendental slabs go
through NumPy (BLAS and SIMD loops), while all cheap elementwise work is
fused into C loops here, so one training batch costs a handful of array
calls instead of hundreds. Same contract and gate stacking as the NumPy
backend; all loops have a fixed order, so results are deterministic run
to run.
"""

import numpy as np

from volmoe.errors import DimensionError, NumericOverflowError

from libc.math cimport isfinite

NAME = "cython"


def batch_forward(double[:, ::1] w_gates, double[::1] b_gates,
                  double[::1] w_out, double b_out,
                  double[:, :, ::1] X):
    """Predictions for a batch of windows X with shape (batch, steps, inputs)."""
    preds, _ = _run_forward(w_gates, b_gates, w_out, b_out, X)
    cdef double[::1] pv = preds
    cdef Py_ssize_t b
    for b in range(pv.shape[0]):
        if not isfinite(pv[b]):
            raise NumericOverflowError("non-finite prediction in forward pass")
    return preds


def _run_forward(double[:, ::1] w_gates, double[::1] b_gates,
                 double[::1] w_out, double b_out,
                 double[:, :, ::1] X):
    cdef Py_ssize_t B = X.shape[0], T = X.shape[1], I = X.shape[2]
    cdef Py_ssize_t H = w_out.shape[0], K = H + I
    if 4 * H != w_gates.shape[0] or K != w_gates.shape[1]:
        raise DimensionError("weight shapes inconsistent with the output head")

    w_gates_t = np.ascontiguousarray(np.asarray(w_gates).T)
    z_np = np.empty((T, B, K))
    act_np = np.empty((T, B, 4 * H))      # f, i, candidate, o
    c_np = np.empty((T, B, H))
    tc_np = np.empty((T, B, H))
    gates_np = np.empty((B, 4 * H))
    h_np = np.zeros((B, H))
    preds_np = np.empty(B)

    cdef double[:, :, ::1] z_all = z_np, c_all = c_np, tc_all = tc_np
    cdef double[:, :, ::1] act_all = act_np
    cdef double[:, ::1] gates = gates_np, h = h_np
    cdef double[::1] preds = preds_np
    cdef Py_ssize_t b, t, j, k
    cdef double acc, cj

    err = np.errstate(over="ignore")
    err.__enter__()
    try:
        for t in range(T):
            for b in range(B):
                for k in range(H):
                    z_all[t, b, k] = h[b, k]
                for k in range(I):
                    z_all[t, b, H + k] = X[b, t, k]
            np.matmul(z_np[t], w_gates_t, out=gates_np)
            for b in range(B):
                for j in range(4 * H):
                    gates[b, j] += b_gates[j]
            # sigmoid blocks: exp(-x) computed on the slab, finished in C
            for b in range(B):
                for j in range(2 * H):
                    act_all[t, b, j] = -gates[b, j]
                for j in range(3 * H, 4 * H):
                    act_all[t, b, j] = -gates[b, j]
            np.exp(act_np[t, :, : 2 * H], out=act_np[t, :, : 2 * H])
            np.exp(act_np[t, :, 3 * H :], out=act_np[t, :, 3 * H :])
            np.tanh(gates_np[:, 2 * H : 3 * H], out=act_np[t, :, 2 * H : 3 * H])
            for b in range(B):
                for j in range(2 * H):
                    act_all[t, b, j] = 1.0 / (1.0 + act_all[t, b, j])
                for j in range(3 * H, 4 * H):
                    act_all[t, b, j] = 1.0 / (1.0 + act_all[t, b, j])
                for j in range(H):
                    cj = act_all[t, b, j] * (c_all[t - 1, b, j] if t > 0 else 0.0)
                    cj += act_all[t, b, H + j] * act_all[t, b, 2 * H + j]
                    c_all[t, b, j] = cj
            np.tanh(c_np[t], out=tc_np[t])
            for b in range(B):
                for j in range(H):
                    h[b, j] = act_all[t, b, 3 * H + j] * tc_all[t, b, j]
        for b in range(B):
            acc = b_out
            for j in range(H):
                acc += w_out[j] * h[b, j]
            preds[b] = acc
    finally:
        err.__exit__(None, None, None)
    return preds_np, (z_np, act_np, c_np, tc_np, h_np)


def batch_loss_grads(double[:, ::1] w_gates, double[::1] b_gates,
                     double[::1] w_out, double b_out,
                     double[:, :, ::1] X, double[::1] y):
    """Mean-MSE loss over the batch and its gradient for every parameter.

    Returns ``(loss, d_w_gates, d_b_gates, d_w_out, d_b_out)``.
    """
    cdef Py_ssize_t B = X.shape[0], T = X.shape[1]
    cdef Py_ssize_t H = w_out.shape[0], K = w_gates.shape[1]
    if B == 0 or y.shape[0] != B:
        raise DimensionError(f"batch of {B} windows vs {y.shape[0]} targets")

    preds_np, cache = _run_forward(w_gates, b_gates, w_out, b_out, X)
    z_np, act_np, c_np, tc_np, h_np = cache
    cdef double[:, :, ::1] z_all = z_np, act_all = act_np, c_all = c_np, tc_all = tc_np
    cdef double[:, ::1] h = h_np
    cdef double[::1] preds = preds_np

    d_w_gates_np = np.zeros((4 * H, K))
    d_b_gates_np = np.zeros(4 * H)
    d_w_out_np = np.zeros(H)
    d_gates_np = np.empty((B, 4 * H))
    d_z_np = np.empty((B, K))
    dw_tmp_np = np.empty((4 * H, K))
    cdef double[:, ::1] d_w_gates = d_w_gates_np, d_gates = d_gates_np, d_z = d_z_np
    cdef double[::1] d_b_gates = d_b_gates_np, d_w_out = d_w_out_np

    d_h_np = np.empty((B, H))
    d_c_np = np.zeros((B, H))
    cdef double[:, ::1] d_h = d_h_np, d_c = d_c_np
    w_np = np.asarray(w_gates)

    cdef double loss = 0.0, d_b_out = 0.0
    cdef double resid, dp, do, dc, fj, ij, gj, oj, tcj, c_prev
    cdef Py_ssize_t b, t, j, k

    for b in range(B):
        if not isfinite(preds[b]):
            raise NumericOverflowError("non-finite prediction in forward pass")
        resid = preds[b] - y[b]
        loss += resid * resid
    loss /= B

    for b in range(B):
        dp = 2.0 * (preds[b] - y[b]) / B
        d_b_out += dp
        for j in range(H):
            d_w_out[j] += dp * h[b, j]
            d_h[b, j] = dp * w_out[j]

    for t in range(T - 1, -1, -1):
        for b in range(B):
            for j in range(H):
                fj = act_all[t, b, j]
                ij = act_all[t, b, H + j]
                gj = act_all[t, b, 2 * H + j]
                oj = act_all[t, b, 3 * H + j]
                tcj = tc_all[t, b, j]
                c_prev = c_all[t - 1, b, j] if t > 0 else 0.0
                do = d_h[b, j] * tcj
                dc = d_c[b, j] + d_h[b, j] * oj * (1.0 - tcj * tcj)
                d_gates[b, j] = (dc * c_prev) * fj * (1.0 - fj)
                d_gates[b, H + j] = (dc * gj) * ij * (1.0 - ij)
                d_gates[b, 2 * H + j] = (dc * ij) * (1.0 - gj * gj)
                d_gates[b, 3 * H + j] = do * oj * (1.0 - oj)
                d_c[b, j] = dc * fj
            for j in range(4 * H):
                d_b_gates[j] += d_gates[b, j]
        np.matmul(d_gates_np.T, z_np[t], out=dw_tmp_np)
        np.add(d_w_gates_np, dw_tmp_np, out=d_w_gates_np)
        np.matmul(d_gates_np, w_np, out=d_z_np)
        for b in range(B):
            for j in range(H):
                d_h[b, j] = d_z[b, j]

    return float(loss), d_w_gates_np, d_b_gates_np, d_w_out_np, float(d_b_out)
