"""Undirected graphs, their propagation operator, and the smooth eigenspace.

The propagation operator is the degree-normalised adjacency with added
self-loops,

    G = (D + I)^{-1/2} (A + I) (D + I)^{-1/2},

whose spectrum lies in (-1, 1]. The eigenvalue-1 eigenspace has one
dimension per connected component and is spanned by the closed-form
vectors sqrt(d_k) restricted to each component, normalised. Everything
here is dense; graphs are desk-scale.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .linalg import symmetric_eigendecomposition

UNIT_EIGENVALUE_TOL = 1e-8


@dataclass(frozen=True)
class Graph:
    """Node count plus normalised (u < v, deduplicated) edge pairs."""

    n: int
    edges: tuple[tuple[int, int], ...]


def make_graph(n: int, edges) -> Graph:
    """Validate and normalise raw edge pairs.

    Reversed duplicates are merged; self-loops and out-of-range indices are
    rejected (self-loops enter only through the operator's augmentation).
    """
    if n < 0:
        raise InputError(f"node count must be nonnegative, got {n}")
    normalised = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if not (0 <= u < n and 0 <= v < n):
            raise InputError(f"edge ({u}, {v}) out of range for {n} nodes")
        if u == v:
            raise InputError(f"self-loop ({u}, {v}) is not allowed in the edge list")
        normalised.add((u, v) if u < v else (v, u))
    return Graph(n, tuple(sorted(normalised)))


def parse_graph_text(text: str) -> Graph:
    """Parse the plain-text format: header "n e", then e lines "u v".

    '#' starts a comment anywhere on a line.
    """
    tokens: list[str] = []
    for line in text.splitlines():
        body = line.split("#", 1)[0]
        tokens.extend(body.split())
    if len(tokens) < 2:
        raise InputError("graph text needs a header line with node and edge counts")
    try:
        n, e = int(tokens[0]), int(tokens[1])
    except ValueError as exc:
        raise InputError(f"bad graph header: {tokens[:2]}") from exc
    if len(tokens) != 2 + 2 * e:
        raise InputError(f"expected {e} edges ({2 * e} indices), found {len(tokens) - 2} tokens")
    try:
        pairs = [(int(tokens[2 + 2 * i]), int(tokens[3 + 2 * i])) for i in range(e)]
    except ValueError as exc:
        raise InputError("edge indices must be integers") from exc
    return make_graph(n, pairs)


def load_graph(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_graph_text(fh.read())


class DisjointSet:
    """Union-find with path compression and union by rank."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return True


def connected_components(graph: Graph) -> tuple[np.ndarray, int]:
    """Label nodes by connected component; labels are dense in [0, m)
    ordered by smallest member index."""
    dsu = DisjointSet(graph.n)
    for u, v in graph.edges:
        dsu.union(u, v)
    labels = np.empty(graph.n, dtype=np.int64)
    next_label = 0
    root_to_label: dict[int, int] = {}
    for node in range(graph.n):
        root = dsu.find(node)
        if root not in root_to_label:
            root_to_label[root] = next_label
            next_label += 1
        labels[node] = root_to_label[root]
    return labels, next_label


@dataclass(frozen=True)
class PropagationOperator:
    """Dense propagation matrix ``g``, its Laplacian I - g, and the
    augmented degrees d_k (original degree plus one)."""

    g: np.ndarray
    laplacian: np.ndarray
    degrees: np.ndarray


def build_propagation_operator(graph: Graph) -> PropagationOperator:
    n = graph.n
    a = np.zeros((n, n))
    for u, v in graph.edges:
        a[u, v] = 1.0
        a[v, u] = 1.0
    degrees = a.sum(axis=1) + 1.0
    inv_sqrt = 1.0 / np.sqrt(degrees)
    g = (a + np.eye(n)) * np.outer(inv_sqrt, inv_sqrt)
    g = 0.5 * (g + g.T)  # kill round-off asymmetry
    return PropagationOperator(g=g, laplacian=np.eye(n) - g, degrees=degrees)


@dataclass(frozen=True)
class SpectralBasis:
    """Orthonormal basis of the eigenvalue-1 eigenspace.

    ``q`` holds one column per component, nonnegative, nonzero exactly on
    that component's nodes. ``lambda2`` is the largest magnitude among the
    remaining eigenvalues (0 if there are none).
    """

    m: int
    q: np.ndarray
    labels: np.ndarray
    lambda2: float


def eigenbasis(
    graph: Graph,
    op: PropagationOperator,
    unit_eigenvalue_tol: float = UNIT_EIGENVALUE_TOL,
) -> SpectralBasis:
    """Build the basis from the closed form (never from the eigensolver);
    the eigensolver only supplies ``lambda2``."""
    labels, m = connected_components(graph)
    sqrt_deg = np.sqrt(op.degrees)
    q = np.zeros((graph.n, m))
    for comp in range(m):
        members = labels == comp
        column = np.where(members, sqrt_deg, 0.0)
        q[:, comp] = column / np.linalg.norm(column)
    eigenvalues, _ = symmetric_eigendecomposition(op.g)
    non_unit = eigenvalues[np.abs(eigenvalues - 1.0) >= unit_eigenvalue_tol]
    lambda2 = float(np.max(np.abs(non_unit))) if non_unit.size else 0.0
    return SpectralBasis(m=m, q=q, labels=labels, lambda2=lambda2)
