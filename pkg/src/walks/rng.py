"""
rng.py — Seeded counter-based random streams

Every Monte-Carlo routine draws from a 64-bit seeded Philox generator.
Replicates are grouped into fixed-size chunks and chunk ``c`` always gets
the substream ``(seed, c)``, so results depend on the seed and the chunk
size only, never on the number of worker threads.

Usage:
    from src.walks.rng import SeededStream, chunked_map
    stream = SeededStream(42)
    child = stream.fork(3)                  # independent substream
    partials = chunked_map(worker, n=10_000, seed=42, threads=4)
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")

DEFAULT_CHUNK_SIZE = 2_048
_SEED_MASK = (1 << 64) - 1


class SeededStream:
    """Deterministic generator with addressable child substreams."""

    def __init__(self, seed: int, path: Tuple[int, ...] = ()) -> None:
        self._seed = int(seed) & _SEED_MASK
        self._path = tuple(int(k) for k in path)
        sequence = np.random.SeedSequence(entropy=self._seed, spawn_key=self._path)
        self._generator = np.random.Generator(np.random.Philox(sequence))

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def path(self) -> Tuple[int, ...]:
        return self._path

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def fork(self, index: int) -> "SeededStream":
        """Child stream ``index``; independent of how much the parent was used."""
        return SeededStream(self._seed, self._path + (int(index),))

    # -- Thin conveniences ---------------------------------------------------

    def choice(self, n: int, size: int, probs: np.ndarray) -> np.ndarray:
        return self._generator.choice(n, size=size, p=probs)

    def integers(self, low: int, high: int, size=None) -> np.ndarray:
        return self._generator.integers(low, high, size=size)

    def random(self, size=None):
        return self._generator.random(size)


# ---------------------------------------------------------------------------
# Chunked, order-preserving parallel map
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Chunk:
    """One block of replicates.

    Attributes:
        index:  Chunk number (also the substream index).
        start:  First replicate id in the chunk.
        size:   Number of replicates.
        stream: The chunk's own random stream.
    """
    index: int
    start: int
    size: int
    stream: SeededStream


def plan_chunks(n: int, seed: int, chunk_size: int = DEFAULT_CHUNK_SIZE) -> List[Chunk]:
    root = SeededStream(seed)
    chunks = []
    for index, start in enumerate(range(0, n, chunk_size)):
        chunks.append(Chunk(index, start, min(chunk_size, n - start), root.fork(index)))
    return chunks


def chunked_map(
    worker: Callable[[Chunk], T],
    n: int,
    seed: int,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
) -> List[T]:
    """Run ``worker`` on every chunk and return the results in chunk order.

    Args:
        worker:     Callable consuming a ``Chunk``; must only use ``chunk.stream``.
        n:          Total number of replicates.
        seed:       Root seed.
        threads:    Worker threads; has no effect on the returned values.
        chunk_size: Replicates per chunk.
    """
    chunks = plan_chunks(n, seed, chunk_size)
    logger.debug("chunked_map  n=%d  chunks=%d  threads=%d", n, len(chunks), threads)
    if threads <= 1 or len(chunks) <= 1:
        return [worker(chunk) for chunk in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, chunks))


def pairwise_total(values: Sequence[np.ndarray]) -> np.ndarray:
    """Fixed-order pairwise reduction of per-chunk partial sums.

    Neighbours are added level by level, ((v0 + v1) + (v2 + v3)) + v4, so
    the rounding depends on the chunk count only.
    """
    if not values:
        return np.zeros(0)
    level = [np.asarray(v, dtype=float) for v in values]
    while len(level) > 1:
        paired = [level[i] + level[i + 1] for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            paired.append(level[-1])
        level = paired
    return level[0]
