"""Adam optimizer with bias correction."""

from __future__ import annotations

import numpy as np

from bandsel.errors import ConfigError, DimensionError, NumericError


class AdamState:
    """Per-parameter first/second moment estimates plus the step counter."""

    def __init__(self, params, beta1=0.9, beta2=0.999, eps=1e-8):
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.first_moment = [np.zeros_like(p) for p in params]
        self.second_moment = [np.zeros_like(p) for p in params]
        self.step_count = 0


def adam_step(params, grads, state, learning_rate, names=None):
    """One in-place Adam update over a flat parameter list.

    Moments decay with beta1/beta2, are bias-corrected by the step count,
    and each parameter moves by -lr * m_hat / (sqrt(v_hat) + eps).
    """
    if learning_rate <= 0:
        raise ConfigError(f"learning rate must be positive, got {learning_rate}")
    if len(params) != len(grads) or len(params) != len(state.first_moment):
        raise DimensionError(
            f"parameter/gradient/state counts differ: {len(params)}, {len(grads)}, {len(state.first_moment)}"
        )
    if names is None:
        names = [f"param{i}" for i in range(len(params))]
    for name, p, g in zip(names, params, grads):
        if p.shape != g.shape:
            raise DimensionError(f"gradient shape {g.shape} does not match parameter {name} {p.shape}")
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient for parameter {name}")
    t = state.step_count + 1
    b1, b2 = state.beta1, state.beta2
    for p, g, m, v in zip(params, grads, state.first_moment, state.second_moment):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        p -= learning_rate * m_hat / (np.sqrt(v_hat) + state.eps)
    state.step_count = t
    return params, state
