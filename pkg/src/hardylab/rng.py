"""Seeded, chunked random streams.

Every Monte Carlo routine draws from Philox (a 64-bit counter-based
generator).  The sample index range is split into fixed-size chunks and each
chunk gets its own child seed, so results depend only on
``(seed, samples, chunk_size)`` and not on how chunks are scheduled.
"""

from __future__ import annotations

from collections.abc import Iterator

import numpy as np

DEFAULT_SEED = 20240917
DEFAULT_CHUNK = 1 << 16


def generator(seed: int, *spawn_key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(seed, spawn_key=tuple(spawn_key))
    return np.random.Generator(np.random.Philox(ss))


def chunks(seed: int, samples: int, chunk_size: int = DEFAULT_CHUNK,
           stream: int = 0) -> Iterator[tuple[np.random.Generator, int]]:
    """Yield ``(rng, count)`` pairs covering ``samples`` draws.

    ``stream`` separates independent uses of the same user seed (for example
    the numerator and denominator of a ratio estimate).
    """
    if samples < 0:
        raise ValueError("samples must be non-negative")
    n_chunks = -(-samples // chunk_size)
    for k in range(n_chunks):
        count = min(chunk_size, samples - k * chunk_size)
        yield generator(seed, stream, k), count
