"""Deterministic RNG streams.

Every randomized routine in this package takes an explicit numpy ``Generator``.
Experiments derive one stream per (scenario, trial) from a single master seed
so that any individual trial can be replayed in isolation.
"""

import zlib

import numpy as np


def key_from_name(name: str) -> int:
    """A stable 32-bit key for a scenario name."""
    return zlib.crc32(name.encode("utf8"))


def derive_rng(master_seed: int, *keys: "int | str") -> np.random.Generator:
    """An independent Generator for the stream (master_seed, key_1, key_2, ...).

    Keys may be ints or names (hashed through :func:`key_from_name`).  Distinct
    key tuples give statistically independent streams (numpy ``SeedSequence``
    hashing); the same tuple always gives the same stream.
    """
    entropy = [master_seed] + [
        k if isinstance(k, int) else key_from_name(k) for k in keys
    ]
    return np.random.default_rng(np.random.SeedSequence(entropy))
