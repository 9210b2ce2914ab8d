"""
Seeded random streams. A stream wraps a numpy Generator seeded from a SeedSequence; substreams are spawned children
of that sequence, so substream(i) never overlaps substream(j) and does not depend on how many workers consume them.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

DEFAULT_SEED = 42


def resolve_seed(seed: Optional[int]) -> int:
    if seed is None:
        logging.warning(f"No seed provided. Using default seed {DEFAULT_SEED}.")
        return DEFAULT_SEED
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"Seed must be an unsigned 64-bit integer, got {seed}")
    return seed


@dataclass
class RandomStream:
    """
    Seeded pseudo-random state. Identical (seed, spawn_key) pairs produce identical draw sequences.

    Parameters
    ----------
    seed : int
        Master seed (unsigned 64 bit).
    spawn_key : tuple of int, optional
        Path of this stream below the master seed. Empty for the master stream itself.
    """
    seed: int
    spawn_key: Tuple[int, ...] = ()

    def __post_init__(self):
        self.seed = resolve_seed(self.seed)
        self.spawn_key = tuple(int(i) for i in self.spawn_key)
        self._generator = np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=self.spawn_key))

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def substream(self, index: int) -> "RandomStream":
        """Independent child stream, a pure function of (seed, spawn_key, index)."""
        if index < 0:
            raise ValueError(f"Substream index must be nonnegative, got {index}")
        return RandomStream(self.seed, self.spawn_key + (index,))

    def uniform(self, size=None) -> np.ndarray:
        return self._generator.random(size)

    def integers(self, low: int, high: int, size=None) -> np.ndarray:
        return self._generator.integers(low, high, size=size)
