"""Minimal reverse-mode autodiff over dense 2-D numpy arrays.

A computation is an acyclic tape of :class:`TapeNode` objects built by the
op functions below. ``backward`` seeds the scalar root and walks the tape
once in reverse topological order, accumulating gradients into each node.
Values are always 2-D float64; scalars are 1x1.
"""
from __future__ import annotations

import numpy as np

from .activations import Activation
from .errors import InputError, ShapeError


class TapeNode:
    __slots__ = ("value", "grad", "parents", "op", "_pull")

    def __init__(self, value, parents=(), op="leaf", pull=None):
        v = np.asarray(value, dtype=np.float64)
        if v.ndim == 0:
            v = v.reshape(1, 1)
        elif v.ndim == 1:
            v = v.reshape(1, -1)
        elif v.ndim != 2:
            raise ShapeError(f"tape values must be 2-D, got shape {v.shape}")
        self.value = v
        self.grad = np.zeros_like(v)
        self.parents = tuple(parents)
        self.op = op
        self._pull = pull

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        return f"TapeNode(op={self.op!r}, shape={self.value.shape})"


def leaf(value) -> TapeNode:
    """A differentiable input (parameter)."""
    return TapeNode(value, op="leaf")


def constant(value) -> TapeNode:
    """A non-parameter input; gradients flow into it but are never reported."""
    return TapeNode(value, op="const")


def _require_same_shape(opname, a, b):
    if a.shape != b.shape:
        raise ShapeError(f"{opname}: shapes differ, {a.shape} vs {b.shape}")


def matmul(a: TapeNode, b: TapeNode) -> TapeNode:
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: inner dimensions differ, {a.shape} x {b.shape}")
    out = TapeNode(a.value @ b.value, (a, b), "matmul")

    def pull():
        a.grad += out.grad @ b.value.T
        b.grad += a.value.T @ out.grad

    out._pull = pull
    return out


def add(a: TapeNode, b: TapeNode) -> TapeNode:
    _require_same_shape("add", a, b)
    out = TapeNode(a.value + b.value, (a, b), "add")

    def pull():
        a.grad += out.grad
        b.grad += out.grad

    out._pull = pull
    return out


def sub(a: TapeNode, b: TapeNode) -> TapeNode:
    _require_same_shape("sub", a, b)
    out = TapeNode(a.value - b.value, (a, b), "sub")

    def pull():
        a.grad += out.grad
        b.grad -= out.grad

    out._pull = pull
    return out


def hadamard(a: TapeNode, b: TapeNode) -> TapeNode:
    _require_same_shape("hadamard", a, b)
    out = TapeNode(a.value * b.value, (a, b), "hadamard")

    def pull():
        a.grad += out.grad * b.value
        b.grad += out.grad * a.value

    out._pull = pull
    return out


def scale(a: TapeNode, c: float) -> TapeNode:
    c = float(c)
    out = TapeNode(c * a.value, (a,), "scale")

    def pull():
        a.grad += c * out.grad

    out._pull = pull
    return out


def transpose(a: TapeNode) -> TapeNode:
    out = TapeNode(a.value.T.copy(), (a,), "transpose")

    def pull():
        a.grad += out.grad.T

    out._pull = pull
    return out


def sum_all(a: TapeNode) -> TapeNode:
    out = TapeNode([[float(a.value.sum())]], (a,), "sum")

    def pull():
        a.grad += out.grad[0, 0]

    out._pull = pull
    return out


def sum_sq(a: TapeNode) -> TapeNode:
    """Sum of squared entries (squared Frobenius norm) as a 1x1 node."""
    out = TapeNode([[float(np.sum(a.value * a.value))]], (a,), "sum_sq")

    def pull():
        a.grad += 2.0 * out.grad[0, 0] * a.value

    out._pull = pull
    return out


def mul_scalar(s: TapeNode, a: TapeNode) -> TapeNode:
    """Multiply matrix node ``a`` by 1x1 node ``s``."""
    if s.shape != (1, 1):
        raise ShapeError(f"mul_scalar: scalar operand must be 1x1, got {s.shape}")
    out = TapeNode(s.value[0, 0] * a.value, (s, a), "mul_scalar")

    def pull():
        s.grad += np.array([[float(np.sum(out.grad * a.value))]])
        a.grad += s.value[0, 0] * out.grad

    out._pull = pull
    return out


def add_col_bias(a: TapeNode, b: TapeNode) -> TapeNode:
    """Add a d x 1 bias to every column of a d x n node."""
    if b.shape != (a.shape[0], 1):
        raise ShapeError(f"add_col_bias: bias shape {b.shape} does not match {a.shape}")
    out = TapeNode(a.value + b.value, (a, b), "add_col_bias")

    def pull():
        a.grad += out.grad
        b.grad += out.grad.sum(axis=1, keepdims=True)

    out._pull = pull
    return out


def activation(a: TapeNode, act: Activation) -> TapeNode:
    if act.kind == "softmax":
        return softmax(a, act.axis)
    deriv = act.derivative(a.value)
    out = TapeNode(act.apply(a.value), (a,), f"act:{act.kind}")

    def pull():
        a.grad += out.grad * deriv

    out._pull = pull
    return out


def sigmoid(a: TapeNode) -> TapeNode:
    p = 1.0 / (1.0 + np.exp(-a.value))
    out = TapeNode(p, (a,), "sigmoid")

    def pull():
        a.grad += out.grad * p * (1.0 - p)

    out._pull = pull
    return out


def softmax(a: TapeNode, axis: int) -> TapeNode:
    if axis not in (0, 1):
        raise InputError(f"softmax axis must be 0 or 1, got {axis}")
    shifted = a.value - a.value.max(axis=axis, keepdims=True)
    ez = np.exp(shifted)
    p = ez / ez.sum(axis=axis, keepdims=True)
    out = TapeNode(p, (a,), "softmax")

    def pull():
        g = out.grad
        a.grad += p * (g - (g * p).sum(axis=axis, keepdims=True))

    out._pull = pull
    return out


def nll_loss(logits: TapeNode, labels, mask) -> TapeNode:
    """Mean negative log-likelihood over the masked columns of a
    classes x nodes logit matrix."""
    labels = np.asarray(labels, dtype=np.int64)
    mask = np.asarray(mask, dtype=np.int64)
    if mask.size == 0:
        raise InputError("nll_loss: mask is empty")
    n = logits.shape[1]
    if labels.shape != (n,):
        raise ShapeError(f"nll_loss: {labels.shape[0]} labels for {n} columns")
    z = logits.value
    shifted = z - z.max(axis=0, keepdims=True)
    logp = shifted - np.log(np.exp(shifted).sum(axis=0, keepdims=True))
    value = -float(logp[labels[mask], mask].mean())
    out = TapeNode([[value]], (logits,), "nll")
    p = np.exp(logp)

    def pull():
        g = np.zeros_like(z)
        g[:, mask] = p[:, mask]
        g[labels[mask], mask] -= 1.0
        logits.grad += (out.grad[0, 0] / mask.size) * g

    out._pull = pull
    return out


def topological_order(root: TapeNode) -> list[TapeNode]:
    """Nodes reachable from ``root``, parents before children."""
    order: list[TapeNode] = []
    seen: set[int] = set()
    stack: list[tuple[TapeNode, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            stack.append((parent, False))
    return order


def zero_gradients(root: TapeNode) -> None:
    for node in topological_order(root):
        node.grad[...] = 0.0


def backprop(root: TapeNode, seed: np.ndarray) -> list[TapeNode]:
    """Accumulate d<seed . root>/d(node) into every node; returns the order."""
    seed = np.asarray(seed, dtype=np.float64)
    if seed.shape != root.value.shape:
        raise ShapeError(f"backprop: seed shape {seed.shape} vs root {root.value.shape}")
    order = topological_order(root)
    root.grad += seed
    for node in reversed(order):
        if node._pull is not None:
            node._pull()
    return order


def backward(loss: TapeNode) -> dict[TapeNode, np.ndarray]:
    """Backpropagate from a scalar loss; returns grads keyed by leaf node."""
    if loss.value.shape != (1, 1):
        raise ShapeError(f"backward: loss must be 1x1, got {loss.value.shape}")
    order = backprop(loss, np.ones((1, 1)))
    return {node: node.grad for node in order if node.op == "leaf"}
