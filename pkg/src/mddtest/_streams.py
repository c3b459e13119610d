"""Derivation of independent, order-insensitive RNG streams from one root seed.

Every random quantity in the package is drawn from a stream addressed by
``(seed, *path)`` where ``path`` is a tuple of small integers.  Streams with
different paths are statistically independent, and the draw for a given path
never depends on which other paths were consumed first, so serial and
parallel execution produce identical results.
"""

from __future__ import annotations

import numpy as np


def substream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for the ``(seed, *path)`` stream."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(path)))


def child_seed(seed: int, *path: int) -> int:
    """Collapse a stream address into a plain integer seed."""
    return int(np.random.SeedSequence(seed, spawn_key=tuple(path)).generate_state(1, np.uint64)[0])
