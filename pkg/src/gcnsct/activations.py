"""Elementwise activations and the sphere relations they satisfy.

The rectifier family has a useful geometric property: for input Z and
output H = relu(Z), the component of H orthogonal to the smooth
eigenspace lies on a sphere whose center and radius are determined by
Z alone. The residual helpers below evaluate those relations so tests
and the verification suite can check them numerically.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, NumericalError
from .linalg import frobenius_inner

_KINDS = {"relu", "leaky_relu", "srelu", "elu", "selu", "identity", "softmax"}

# round-off clamp applied to squared radii / traces before sqrt
CLAMP_EPS = 1e-12
# anything more negative than this signals a real bug, not round-off
NEGATIVE_TOL = 1e-9


@dataclass(frozen=True)
class Activation:
    """An elementwise activation with its parameters.

    ``a`` is the leaky slope, the elu scale, or the selu inner scale
    depending on ``kind``; ``t`` is the srelu threshold; ``c`` the selu
    outer scale. The softmax kind normalises the explicitly given axis
    and is the only non-elementwise member.
    """

    kind: str
    a: float = 0.0
    t: float = 0.0
    c: float = 1.0
    axis: int = 0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ConfigError(f"unknown activation kind {self.kind!r}")
        if self.kind == "leaky_relu" and not 0.0 < self.a < 1.0:
            raise ConfigError(f"leaky_relu slope must lie strictly in (0, 1), got {self.a}")
        if self.kind == "elu" and self.a <= 0.0:
            raise ConfigError(f"elu scale must be positive, got {self.a}")
        if self.kind == "selu" and (self.a <= 0.0 or self.c <= 0.0):
            raise ConfigError(f"selu scales must be positive, got a={self.a}, c={self.c}")
        if self.kind == "softmax" and self.axis not in (0, 1):
            raise ConfigError(f"softmax axis must be 0 or 1, got {self.axis}")

    def apply(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        if self.kind == "relu":
            return np.maximum(z, 0.0)
        if self.kind == "leaky_relu":
            return np.where(z > 0.0, z, self.a * z)
        if self.kind == "srelu":
            return np.maximum(z, self.t)
        if self.kind == "elu":
            return np.maximum(z, 0.0) + np.minimum(0.0, self.a * np.expm1(np.minimum(z, 0.0)))
        if self.kind == "selu":
            inner = np.maximum(z, 0.0) + np.minimum(0.0, self.a * np.expm1(np.minimum(z, 0.0)))
            return self.c * inner
        if self.kind == "identity":
            return z.copy()
        # softmax over the configured axis
        shifted = z - z.max(axis=self.axis, keepdims=True)
        ez = np.exp(shifted)
        return ez / ez.sum(axis=self.axis, keepdims=True)

    def derivative(self, z: np.ndarray) -> np.ndarray:
        """Elementwise derivative at ``z`` (subgradient 0 at kinks)."""
        z = np.asarray(z, dtype=np.float64)
        if self.kind == "relu":
            return (z > 0.0).astype(np.float64)
        if self.kind == "leaky_relu":
            return np.where(z > 0.0, 1.0, self.a)
        if self.kind == "srelu":
            return (z > self.t).astype(np.float64)
        if self.kind == "elu":
            return np.where(z > 0.0, 1.0, self.a * np.exp(np.minimum(z, 0.0)))
        if self.kind == "selu":
            return self.c * np.where(z > 0.0, 1.0, self.a * np.exp(np.minimum(z, 0.0)))
        if self.kind == "identity":
            return np.ones_like(z)
        raise ConfigError("softmax has no elementwise derivative; use the softmax tape op")


def relu() -> Activation:
    return Activation("relu")


def leaky_relu(a: float) -> Activation:
    return Activation("leaky_relu", a=a)


def srelu(t: float = -1.0) -> Activation:
    return Activation("srelu", t=t)


def elu(a: float = 1.0) -> Activation:
    return Activation("elu", a=a)


def selu(a: float = 1.6732632423543772, c: float = 1.0507009873554805) -> Activation:
    return Activation("selu", a=a, c=c)


def identity() -> Activation:
    return Activation("identity")


def softmax_over(axis: int) -> Activation:
    return Activation("softmax", axis=axis)


def activation_from_config(name: str, param: float | None = None) -> Activation:
    """Build an activation from its config-file spelling."""
    name = name.replace("-", "_")
    if name == "relu":
        return relu()
    if name == "leaky_relu":
        return leaky_relu(0.2 if param is None else param)
    if name == "srelu":
        return srelu(-1.0 if param is None else param)
    if name == "elu":
        return elu(1.0 if param is None else param)
    if name == "selu":
        return selu()
    if name == "identity":
        return identity()
    raise ConfigError(f"unknown activation name {name!r}")


def pos_neg_split(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split ``z`` into nonnegative parts with z = plus - minus and
    <plus, minus>_F = 0."""
    z = np.asarray(z, dtype=np.float64)
    return np.maximum(z, 0.0), np.maximum(-z, 0.0)


class SphereCheck(NamedTuple):
    lhs: float
    radius: float
    residual: float


def _project(z: np.ndarray, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    zm = (z @ q) @ q.T
    return zm, z - zm


def _safe_radius(radius_sq: float, context: str) -> float:
    if radius_sq < -NEGATIVE_TOL:
        raise NumericalError(f"{context}: squared radius {radius_sq:.3e} is negative")
    return float(np.sqrt(max(radius_sq, 0.0)))


def relu_sphere_residual(z: np.ndarray, basis) -> SphereCheck:
    """Sphere relation for relu after projecting onto the smooth eigenspace.

    With H = relu(Z), the off-eigenspace part of H sits at distance
    ``radius`` from half the off-eigenspace part of Z; ``residual`` is how
    far the computed point is from that sphere.
    """
    q = basis.q
    h = np.maximum(np.atleast_2d(np.asarray(z, dtype=np.float64)), 0.0)
    zm, zp = _project(z, q)
    hm, hp = _project(h, q)
    lhs = float(np.linalg.norm(hp - 0.5 * zp))
    radius_sq = 0.25 * float(np.sum(zp * zp)) - frobenius_inner(hm, hm - zm)
    radius = _safe_radius(radius_sq, "relu_sphere_residual")
    return SphereCheck(lhs, radius, abs(lhs - radius))


def leaky_relu_sphere_residual(z: np.ndarray, a: float, basis) -> SphereCheck:
    """Same as :func:`relu_sphere_residual` for the leaky rectifier.

    ``a = 0`` is allowed here (it degenerates to the relu relation) even
    though the activation itself requires a strictly positive slope.
    """
    if not 0.0 <= a < 1.0:
        raise ConfigError(f"slope must lie in [0, 1), got {a}")
    q = basis.q
    z2 = np.atleast_2d(np.asarray(z, dtype=np.float64))
    h = np.where(z2 > 0.0, z2, a * z2)
    zm, zp = _project(z2, q)
    hm, hp = _project(h, q)
    lhs = float(np.linalg.norm(hp - 0.5 * (1.0 + a) * zp))
    radius_sq = 0.25 * (1.0 - a) ** 2 * float(np.sum(zp * zp)) - frobenius_inner(
        hm - zm, hm - a * zm
    )
    radius = _safe_radius(radius_sq, "leaky_relu_sphere_residual")
    return SphereCheck(lhs, radius, abs(lhs - radius))


def relu_midpoint_sphere_residual(z: np.ndarray) -> float:
    """Residual of the whole-space sphere relation |relu(Z) - Z/2| = |Z/2|."""
    z = np.asarray(z, dtype=np.float64)
    h = np.maximum(z, 0.0)
    return abs(float(np.sum((h - 0.5 * z) ** 2)) - 0.25 * float(np.sum(z * z)))


def split_projection_identity_residual(z: np.ndarray, basis) -> float:
    """Residual of the identity tying the sphere defect of relu(Z) to the
    inner product of the projected positive and negative parts of Z."""
    q = basis.q
    z2 = np.atleast_2d(np.asarray(z, dtype=np.float64))
    h = np.maximum(z2, 0.0)
    _, zp = _project(z2, q)
    _, hp = _project(h, q)
    defect = 0.25 * float(np.sum(zp * zp)) - float(np.sum((hp - 0.5 * zp) ** 2))
    plus, minus = pos_neg_split(z2)
    plus_m = (plus @ q) @ q.T
    minus_m = (minus @ q) @ q.T
    return abs(defect - frobenius_inner(plus_m, minus_m))
