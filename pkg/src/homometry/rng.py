"""Counter-based random streams.

Every stream is a Philox-4x64 generator keyed by ``(seed, stream_id)``.  A
logical purpose inside a generator (parity choice, dimer signs, flips, ...)
selects a disjoint counter range by writing the purpose number into the top
counter word, so values depend only on (seed, stream_id, purpose, position)
and growing a window never perturbs earlier sites.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1

# purposes (top counter word)
VALUES = 0
PARITY = 1
SIGNS = 2
FLIPS = 3
EDGE = 4
BOUNDARY = 5


@dataclass(frozen=True)
class SeededRng:
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= int(v) <= _MASK64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer")

    def generator(self, purpose: int = VALUES) -> np.random.Generator:
        key = int(self.seed) | (int(self.stream_id) << 64)
        counter = [0, 0, 0, int(purpose)]
        return np.random.Generator(np.random.Philox(key=key, counter=counter))

    def uniform(self, n: int, purpose: int = VALUES) -> np.ndarray:
        """First ``n`` doubles in [0, 1) of the given purpose stream."""
        return self.generator(purpose).random(n)

    def spawn(self, stream_id: int) -> "SeededRng":
        return SeededRng(self.seed, stream_id)


def as_rng(rng) -> SeededRng:
    if isinstance(rng, SeededRng):
        return rng
    if rng is None:
        return SeededRng(0, 0)
    return SeededRng(int(rng), 0)
