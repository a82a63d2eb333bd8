"""AdamW with decoupled weight decay over dicts of numpy arrays."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class AdamWState:
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    @classmethod
    def zeros_like(cls, params):
        return cls(0, {k: np.zeros_like(p) for k, p in params.items()},
                   {k: np.zeros_like(p) for k, p in params.items()})


def adamw_step(params, grads, state: AdamWState, *, lr, beta1=0.9, beta2=0.999, eps=1e-8,
               weight_decay=0.0, decay_mask=None):
    """One AdamW update; returns (new_params, new_state) without mutating inputs.

    param <- param - lr * m_hat / (sqrt(v_hat) + eps) - lr * wd * mask * param

    ``decay_mask`` maps names to 0/1 arrays (or scalars); by default only
    tensors with ndim >= 2 are decayed.
    """
    t = state.step + 1
    bc1 = 1.0 - beta1 ** t
    bc2 = 1.0 - beta2 ** t
    new_params, new_m, new_v = {}, {}, {}
    for name, p in params.items():
        g = grads[name]
        m = beta1 * state.m[name] + (1.0 - beta1) * g
        v = beta2 * state.v[name] + (1.0 - beta2) * g * g
        m_hat = m / bc1
        v_hat = v / bc2
        if decay_mask is None:
            dm = 1.0 if p.ndim >= 2 else 0.0
        else:
            dm = decay_mask[name]
        new_params[name] = p - lr * m_hat / (np.sqrt(v_hat) + eps) - lr * weight_decay * dm * p
        new_m[name] = m
        new_v[name] = v
    return new_params, AdamWState(t, new_m, new_v)
