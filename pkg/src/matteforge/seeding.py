"""Stable seed derivation for reproducible builds.

Each unit of work (a composite slot, an entity's expression suite, a
balancing shuffle) gets its own generator derived from the master seed and
a path of labels. Derivation goes through SHA-256 so it is stable across
processes, platforms, and Python versions, unlike the builtin hash().
Parallel and serial executions therefore draw identical random streams.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master_seed: int, *path: int | str) -> int:
    """Collapse (master_seed, *path) into a 128-bit integer seed."""
    material = repr((int(master_seed),) + tuple(path)).encode("utf-8")
    digest = hashlib.sha256(material).digest()
    return int.from_bytes(digest[:16], "little")


def spawn_rng(master_seed: int, *path: int | str) -> np.random.Generator:
    """Create an independent generator for one unit of work."""
    return np.random.default_rng(derive_seed(master_seed, *path))
