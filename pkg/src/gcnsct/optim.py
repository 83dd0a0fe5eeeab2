"""Adam with bias correction, plus decoupled L2 decay for the trainer."""
from __future__ import annotations

import numpy as np

from .errors import ShapeError


class Adam:
    """Standard Adam. ``step`` updates parameters in place."""

    def __init__(self, shapes, lr=1e-2, beta1=0.9, beta2=0.999, eps=1e-8):
        self.lr = float(lr)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.step_count = 0
        self.m = [np.zeros(s) for s in shapes]
        self.v = [np.zeros(s) for s in shapes]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        if len(params) != len(self.m) or len(grads) != len(self.m):
            raise ShapeError(
                f"adam: expected {len(self.m)} tensors, got {len(params)} params / {len(grads)} grads"
            )
        for p, g, m in zip(params, grads, self.m):
            if p.shape != m.shape or g.shape != m.shape:
                raise ShapeError(f"adam: shape mismatch {p.shape} / {g.shape} vs state {m.shape}")
        self.step_count += 1
        t = self.step_count
        bc1 = 1.0 - self.beta1**t
        bc2 = 1.0 - self.beta2**t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


def adam_step(state: Adam, params: list[np.ndarray], grads: list[np.ndarray]):
    """Functional spelling of :meth:`Adam.step`; returns (params, state)."""
    state.step(params, grads)
    return params, state


def apply_weight_decay(params: list[np.ndarray], decays: list[float], lr: float) -> None:
    """Decoupled L2: shrink each parameter by lr * decay * param."""
    for p, wd in zip(params, decays):
        if wd:
            p -= lr * wd * p
