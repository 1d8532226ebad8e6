"""Adam optimizer over the flat parameter vector, plus global-norm clipping."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionError, InvalidParameterError
from .params import LstmParams


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step_count: int = 0
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    @classmethod
    def for_params(cls, params: LstmParams, lr: float = 0.001, **kwargs) -> "AdamState":
        return cls(
            m=np.zeros_like(params.flat), v=np.zeros_like(params.flat), lr=lr, **kwargs
        )


def adam_step(
    params: LstmParams, grads: np.ndarray, state: AdamState
) -> tuple[LstmParams, AdamState]:
    """One Adam update with bias correction; mutates and returns its inputs."""
    if grads.shape != params.flat.shape or grads.shape != state.m.shape:
        raise DimensionError(
            f"gradient shape {grads.shape} vs parameters {params.flat.shape}"
        )
    state.step_count += 1
    t = state.step_count
    state.m *= state.beta1
    state.m += (1.0 - state.beta1) * grads
    state.v *= state.beta2
    state.v += (1.0 - state.beta2) * (grads * grads)
    m_hat = state.m / (1.0 - state.beta1**t)
    v_hat = state.v / (1.0 - state.beta2**t)
    params.flat -= state.lr * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return params, state


def clip_global_norm(grads: np.ndarray, max_norm: float) -> float:
    """Scale grads in place so their L2 norm is at most max_norm; returns
    the pre-clip norm."""
    if not max_norm > 0.0:
        raise InvalidParameterError(f"max_norm must be > 0, got {max_norm}")
    norm = float(np.linalg.norm(grads))
    if norm > max_norm:
        grads *= max_norm / norm
    return norm
