"""Master-seed fan-out.

Every stochastic component draws from a generator built as
``SeedSequence(seed, spawn_key=(ROLE, *indices))``. Keys depend only on the
logical position of the work item (role, iteration, particle, trial, preset
and instance names), never on scheduling, so results do not depend on how
many workers run them.
"""

from __future__ import annotations

import os
import zlib

import numpy as np

DEFAULT_SEED = 20060101

ROLES = {
    "trial": 1,
    "swarm-init": 2,
    "evaluate": 3,
    "move": 4,
}


def name_key(name: str) -> int:
    return zlib.crc32(name.encode("utf-8"))


def derive_rng(seed: int, role: str, *indices: int) -> np.random.Generator:
    key = (ROLES[role], *(int(i) for i in indices))
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=key))


def default_workers() -> int:
    """Worker count: ``PSOACS_WORKERS`` if set, else the logical core count."""
    env = os.environ.get("PSOACS_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
