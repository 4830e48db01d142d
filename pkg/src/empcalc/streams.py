"""Deterministic random stream derivation.

All randomness in this package flows through numpy's SeedSequence so that
a (root seed, key path) pair always names the same stream, independent of
thread scheduling, platform, or how many other streams were drawn first.
Replicate i of an experiment uses ``derive_rng(seed, i)``; nested contexts
extend the key path instead of consuming draws from a shared generator.
"""

from __future__ import annotations

import numpy as np


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """Return the generator uniquely named by ``seed`` and a key path.

    The derivation is counter-based: spawn_key indexing into SeedSequence,
    never sequential draws from a parent generator.  Two calls with equal
    arguments produce independent generator objects in identical states.
    """
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(key)))


def derive_seed(seed: int, *key: int) -> int:
    """Collapse (seed, key path) to a single integer seed for sub-experiments."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=tuple(key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
