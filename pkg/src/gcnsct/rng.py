"""Seeded random streams.

Every stochastic path in the package draws from a counter-based Philox
generator keyed by a single 64-bit seed plus an integer stream key, so
independent sub-tasks (sweep chunks, per-run initialisation, dropout)
get decorrelated but reproducible streams.
"""
from __future__ import annotations

import numpy as np


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return the generator for ``key`` under the given master seed."""
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))
