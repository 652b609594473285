"""Reproducible random streams keyed by (master seed, stream index).

Every randomized routine in the package draws from an explicit RngStream.
Two streams built from the same pair produce identical draw sequences, and
streams with different indices are statistically independent, so per-trial
substreams make campaign results independent of execution order.
"""
from __future__ import annotations

import numpy as np

DEFAULT_SEED = 20230915


class RngStream:
    """A numpy Generator bound to a (master_seed, stream_index) pair."""

    def __init__(self, master_seed: int = DEFAULT_SEED, stream_index: int = 0):
        if master_seed < 0 or master_seed >= 2**64:
            raise ValueError("master_seed must fit in 64 bits")
        self.master_seed = int(master_seed)
        self.stream_index = int(stream_index)
        seq = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        self.gen = np.random.default_rng(seq)

    def substream(self, index: int) -> "RngStream":
        """Derive an independent stream; index 0 is not the parent stream."""
        mixed = (self.stream_index << 20) ^ (index + 1)
        return RngStream(self.master_seed, mixed)

    def bit(self) -> int:
        return int(self.gen.integers(0, 2))

    def bits(self, n: int) -> np.ndarray:
        return self.gen.integers(0, 2, size=n, dtype=np.int8)

    def random(self) -> float:
        return float(self.gen.random())

    def uniform(self, low: float, high: float) -> float:
        return float(self.gen.uniform(low, high))

    def choice_index(self, probabilities: np.ndarray) -> int:
        """Sample an index from a probability vector (assumed to sum to 1)."""
        u = self.gen.random()
        acc = 0.0
        for i, p in enumerate(probabilities):
            acc += p
            if u < acc:
                return i
        return len(probabilities) - 1

    def subset(self, population, k: int) -> list:
        """Uniform k-subset, returned sorted."""
        picked = self.gen.choice(len(population), size=k, replace=False)
        return sorted(population[i] for i in picked)

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"
