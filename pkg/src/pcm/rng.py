"""Named random streams derived from one master seed.

Every stochastic component draws from its own stream, keyed by a name and
optional integer indices::

    stream(seed, "coords")        # coordinate selection
    stream(seed, "noise", 0)      # gradient noise of worker 0 (serial runs use 0)
    stream(seed, "noise", j)      # gradient noise of parallel worker j
    stream(seed, "init")          # random initial point
    stream(seed, "subsample")     # dataset subsampling

The splitting rule is ``SeedSequence(seed, spawn_key=(crc32(name), *indices))``,
so streams are independent of each other and adding a worker or a new named
stream never perturbs an existing one.
"""

from __future__ import annotations

import zlib

import numpy as np


def stream_key(name: str, *indices: int) -> tuple[int, ...]:
    return (zlib.crc32(name.encode("utf-8")), *(int(i) for i in indices))


def stream(seed: int, name: str, *indices: int) -> np.random.Generator:
    """Return the generator for the named sub-stream of ``seed``."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=stream_key(name, *indices))
    return np.random.Generator(np.random.PCG64(ss))
