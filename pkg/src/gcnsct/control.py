"""Steering output smoothness by shifting the smooth component of the input.

For a connected graph the smooth eigenspace is one line, spanned by the
unit vector e with entries sqrt(d_k)/sqrt(sum d). Shifting a feature
vector z along e leaves its off-eigenspace part untouched, but after a
rectifier the *normalised* smoothness of the output moves across almost
its whole range. This module evaluates those shifts: grid sweeps, the
closed-form minimum reachable with relu, the monotone region of the
sweep, and the near-[0, 1) range reachable with the leaky rectifier.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .activations import Activation
from .errors import InputError, ShapeError
from .graphs import PropagationOperator, SpectralBasis

DEGENERATE_PERP_TOL = 1e-10
MONOTONE_SLACK = 1e-10
ARGMAX_TIE_RTOL = 1e-12


def shifted_input(z: np.ndarray, alpha: float, e: np.ndarray) -> np.ndarray:
    """z - alpha * e for a unit vector e; only the smooth component moves."""
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    e = np.asarray(e, dtype=np.float64).reshape(-1)
    if z.shape != e.shape:
        raise ShapeError(f"shift: z has {z.shape[0]} entries, e has {e.shape[0]}")
    if abs(float(np.linalg.norm(e)) - 1.0) > 1e-10:
        raise InputError("shift direction must be a unit vector")
    return z - float(alpha) * e


@dataclass(frozen=True)
class SweepCurve:
    """Normalised and unnormalised smoothness of the activated output over
    a grid of shift amounts, plus the input's own values for reference."""

    alphas: np.ndarray
    s_values: np.ndarray
    dist_values: np.ndarray
    input_s: float
    input_dist: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("alpha,s,dist\n")
        for a, s, d in zip(self.alphas, self.s_values, self.dist_values):
            buf.write(f"{float(a)!r},{float(s)!r},{float(d)!r}\n")
        return buf.getvalue()


def _smoothness_rows(h: np.ndarray, e: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-row (s, dist) for a grid x n matrix of shifted outputs."""
    proj = h @ e
    norms = np.linalg.norm(h, axis=1)
    dist = np.linalg.norm(h - proj[:, None] * e[None, :], axis=1)
    s = np.ones_like(norms)
    nonzero = norms > 0.0
    s[nonzero] = np.abs(proj[nonzero]) / norms[nonzero]
    return np.clip(s, 0.0, 1.0), dist


def sweep(
    z: np.ndarray,
    basis: SpectralBasis,
    activation: Activation,
    alphas: np.ndarray,
    direction: np.ndarray | None = None,
) -> SweepCurve:
    """Evaluate s(act(z - alpha * direction)) over the grid.

    Requires a connected graph (one-dimensional eigenspace). ``direction``
    defaults to the unit basis vector e; the reporting command passes the
    degree-scaled vector sqrt(d) instead so a small alpha range covers the
    clipping transitions.
    """
    if basis.m != 1:
        raise InputError(
            f"sweep needs a connected graph (eigenspace dimension 1), got {basis.m} components"
        )
    alphas = np.asarray(alphas, dtype=np.float64).reshape(-1)
    if alphas.size == 0:
        raise InputError("sweep grid is empty")
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    e = basis.q[:, 0]
    if direction is None:
        direction = e
    direction = np.asarray(direction, dtype=np.float64).reshape(-1)
    if direction.shape != z.shape:
        raise ShapeError(f"direction has {direction.shape[0]} entries, z has {z.shape[0]}")
    shifted = z[None, :] - alphas[:, None] * direction[None, :]
    h = activation.apply(shifted)
    s_values, dist_values = _smoothness_rows(h, e)
    input_s, input_dist = _smoothness_rows(z[None, :], e)
    return SweepCurve(
        alphas=alphas,
        s_values=s_values,
        dist_values=dist_values,
        input_s=float(input_s[0]),
        input_dist=float(input_dist[0]),
    )


def _degree_direction(op: PropagationOperator) -> tuple[np.ndarray, float]:
    """(unit smooth vector e, its normalisation c = sqrt(sum d))."""
    sqrt_deg = np.sqrt(op.degrees)
    c = float(np.linalg.norm(sqrt_deg))
    return sqrt_deg / c, c


def _require_nondegenerate(z: np.ndarray, e: np.ndarray) -> None:
    perp = z - float(z @ e) * e
    if np.linalg.norm(perp) <= DEGENERATE_PERP_TOL * max(np.linalg.norm(z), 1e-300):
        raise InputError("input lies in the smooth eigenspace; shifting cannot change s")


def relu_min_smoothness_closed_form(z: np.ndarray, op: PropagationOperator) -> float:
    """Minimum of s(relu(z - alpha e)) over alpha, in closed form.

    Equals sqrt(sum of augmented degrees over the argmax set of
    x = z / sqrt(d), divided by the total). Assumes a connected graph and
    an input with a nonzero off-eigenspace part.
    """
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    if z.shape[0] != op.degrees.shape[0]:
        raise ShapeError(f"z has {z.shape[0]} entries, operator has {op.degrees.shape[0]} nodes")
    e, _ = _degree_direction(op)
    _require_nondegenerate(z, e)
    x = z / np.sqrt(op.degrees)
    tie_tol = ARGMAX_TIE_RTOL * float(np.max(np.abs(x)))
    top = x >= float(np.max(x)) - tie_tol
    return float(np.sqrt(op.degrees[top].sum() / op.degrees.sum()))


def is_nonincreasing(values: np.ndarray, slack: float = MONOTONE_SLACK) -> bool:
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    return bool(np.all(np.diff(values) <= slack))


def verify_monotone_region(z: np.ndarray, op: PropagationOperator, alphas: np.ndarray) -> bool:
    """Check that s(relu(z - alpha e)) is non-increasing in alpha on a grid
    kept strictly below the full-clipping threshold c * max(x)."""
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    alphas = np.sort(np.asarray(alphas, dtype=np.float64).reshape(-1))
    e, c = _degree_direction(op)
    _require_nondegenerate(z, e)
    x = z / np.sqrt(op.degrees)
    threshold = c * float(np.max(x))
    if alphas.size and float(alphas[-1]) >= threshold:
        raise InputError(
            f"grid reaches {alphas[-1]!r}, at or above the clipping threshold {threshold!r}"
        )
    shifted = z[None, :] - alphas[:, None] * e[None, :]
    s_values, _ = _smoothness_rows(np.maximum(shifted, 0.0), e)
    return is_nonincreasing(s_values)


def leaky_range_probe(
    z: np.ndarray, basis: SpectralBasis, a: float, grid_points: int = 10_000
) -> tuple[float, float]:
    """Empirical range of s(leaky(z - alpha e)) over a wide shift interval.

    Sweeps 10^4 grid points across +-100 |z| around the input's smooth
    coefficient and adds the exact root of <leaky(z(alpha)), e> = 0 found
    by bisection (the inner product is strictly decreasing in alpha), so
    the reported minimum genuinely approaches 0.
    """
    if basis.m != 1:
        raise InputError("range probe needs a connected graph")
    if not 0.0 < a < 1.0:
        raise InputError(f"leaky slope must lie in (0, 1), got {a}")
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    e = basis.q[:, 0]
    _require_nondegenerate(z, e)
    center = float(z @ e)
    radius = 100.0 * float(np.linalg.norm(z))

    def act(m: np.ndarray) -> np.ndarray:
        return np.where(m > 0.0, m, a * m)

    def smooth_coeff(alpha: float) -> float:
        return float(act(z - alpha * e) @ e)

    lo, hi = center - radius, center + radius
    if smooth_coeff(lo) < 0.0 or smooth_coeff(hi) > 0.0:  # pragma: no cover
        raise InputError("probe interval does not bracket the zero crossing")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if smooth_coeff(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)

    alphas = np.append(np.linspace(center - radius, center + radius, grid_points), root)
    shifted = z[None, :] - alphas[:, None] * e[None, :]
    s_values, _ = _smoothness_rows(act(shifted), e)
    return float(np.min(s_values)), float(np.max(s_values))
