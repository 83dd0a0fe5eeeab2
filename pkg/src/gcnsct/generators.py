"""Seeded synthetic graph generators used by experiments and tests."""
from __future__ import annotations

import numpy as np

from .graphs import Graph, connected_components, make_graph


def gnp_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    """Erdos-Renyi graph: each pair is an edge independently with prob p."""
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.append((u, v))
    return make_graph(n, edges)


def _bridge_components(rng: np.random.Generator, graph: Graph) -> Graph:
    """Add edges between components until the graph is connected."""
    edges = set(graph.edges)
    labels, m = connected_components(graph)
    while m > 1:
        members0 = np.flatnonzero(labels == 0)
        members1 = np.flatnonzero(labels == 1)
        u = int(rng.choice(members0))
        v = int(rng.choice(members1))
        edges.add((u, v) if u < v else (v, u))
        graph = make_graph(graph.n, edges)
        labels, m = connected_components(graph)
    return graph


def random_connected_graph(rng: np.random.Generator, n: int, p: float) -> Graph:
    return _bridge_components(rng, gnp_graph(rng, n, p))


def random_degree_graph(
    rng: np.random.Generator, n: int = 100, min_degree: int = 2, max_degree: int = 10
) -> Graph:
    """Connected graph whose nodes get target degrees drawn uniformly from
    [min_degree, max_degree].

    Degrees are realised by random stub pairing with rejection of
    self-loops and repeated edges, then components are bridged until the
    graph is connected, so realised degrees can differ slightly from the
    targets.
    """
    targets = rng.integers(min_degree, max_degree + 1, size=n)
    stubs = np.repeat(np.arange(n), targets)
    rng.shuffle(stubs)
    if stubs.size % 2 == 1:
        stubs = stubs[:-1]
    edges = set()
    for u, v in zip(stubs[0::2], stubs[1::2]):
        u, v = int(u), int(v)
        if u == v:
            continue
        edges.add((u, v) if u < v else (v, u))
    return _bridge_components(rng, make_graph(n, edges))


def sbm_graph(
    rng: np.random.Generator, block_sizes: list[int], p_in: float, p_out: float
) -> tuple[Graph, np.ndarray]:
    """Two-or-more-block stochastic block model; returns the graph and the
    block label of each node."""
    n = int(sum(block_sizes))
    blocks = np.repeat(np.arange(len(block_sizes)), block_sizes)
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            p = p_in if blocks[u] == blocks[v] else p_out
            if rng.random() < p:
                edges.append((u, v))
    return make_graph(n, edges), blocks
