"""Smoothness measures for node features.

Features are d x n matrices: row i holds dimension i of the feature
across all n nodes. Three notions are computed against a graph's
propagation operator and smooth eigenspace:

  * distance to the eigenspace (Frobenius norm of the off-eigenspace part),
  * Dirichlet energy sqrt(trace(H (I - G) H^T)),
  * per-dimension normalised smoothness s(z) = |projection| / |z| in [0, 1],
    with s(0) = 1 by convention (the zero vector counts as fully smooth).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ShapeError
from .graphs import PropagationOperator, SpectralBasis

TRACE_CLAMP = 1e-12
TRACE_NEGATIVE_TOL = 1e-9


def _as_features(h) -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)
    if h.ndim == 1:
        h = h.reshape(1, -1)
    if h.ndim != 2:
        raise ShapeError(f"features must be 2-D (d x n), got shape {h.shape}")
    return h


def decompose(h, basis: SpectralBasis) -> tuple[np.ndarray, np.ndarray]:
    """Split features into the smooth part H Q Q^T and its complement."""
    h = _as_features(h)
    if h.shape[1] != basis.q.shape[0]:
        raise ShapeError(f"features have {h.shape[1]} columns, basis expects {basis.q.shape[0]}")
    smooth = (h @ basis.q) @ basis.q.T
    return smooth, h - smooth


def distance_to_eigenspace(h, basis: SpectralBasis) -> float:
    """Frobenius distance from the features to the smooth subspace."""
    _, perp = decompose(h, basis)
    return float(np.linalg.norm(perp))


def dirichlet_energy(h, op: PropagationOperator) -> float:
    """sqrt(trace(H (I - G) H^T)); tiny negative traces are round-off and
    clamp to zero, clearly negative ones raise."""
    h = _as_features(h)
    if h.shape[1] != op.laplacian.shape[0]:
        raise ShapeError(
            f"features have {h.shape[1]} columns, operator is {op.laplacian.shape[0]} nodes"
        )
    trace = float(np.sum((h @ op.laplacian) * h))
    if trace < -TRACE_NEGATIVE_TOL:
        raise NumericalError(f"dirichlet trace {trace:.3e} is negative; operator looks broken")
    return float(np.sqrt(max(trace, 0.0)))


def normalized_smoothness(z, basis: SpectralBasis) -> float:
    """s(z) = |Q^T z| / |z|, aggregated over components; exactly 1 for z = 0."""
    z = np.asarray(z, dtype=np.float64).reshape(-1)
    if z.shape[0] != basis.q.shape[0]:
        raise ShapeError(f"vector has {z.shape[0]} entries, basis expects {basis.q.shape[0]}")
    norm = float(np.linalg.norm(z))
    if norm == 0.0:
        return 1.0
    s = float(np.linalg.norm(basis.q.T @ z)) / norm
    return min(max(s, 0.0), 1.0)


@dataclass(frozen=True)
class SmoothnessReport:
    """All smoothness measures for one feature matrix."""

    s: tuple[float, ...]
    dist_to_m: float
    dirichlet: float
    normalized_dirichlet: float

    def to_json_dict(self) -> dict:
        return {
            "s": list(self.s),
            "dist_to_M": self.dist_to_m,
            "dirichlet": self.dirichlet,
            "normalized_dirichlet": self.normalized_dirichlet,
        }


def smoothness_report(h, op: PropagationOperator, basis: SpectralBasis) -> SmoothnessReport:
    h = _as_features(h)
    per_dim = tuple(normalized_smoothness(row, basis) for row in h)
    dist = distance_to_eigenspace(h, basis)
    energy = dirichlet_energy(h, op)
    total_sq = float(np.sum(h * h))
    # the zero matrix carries no energy; define the ratio as 0 there
    normalized = (energy * energy / total_sq) if total_sq > 0.0 else 0.0
    return SmoothnessReport(
        s=per_dim, dist_to_m=dist, dirichlet=energy, normalized_dirichlet=normalized
    )
