"""Seeded random source with a pinned Box-Muller normal transform.

Every stochastic operation takes one of these explicitly, so a run is
fully determined by its 64-bit seed.  Normal variates are derived from
PCG64 uniforms through the same Box-Muller expression everywhere, which
keeps outputs bit-stable for a given platform and numpy version.
"""

from __future__ import annotations

import numpy as np


class SeededRng:
    def __init__(self, seed: int):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def normal(self, shape) -> np.ndarray:
        """Standard-normal samples of the given shape (Box-Muller)."""
        n = int(np.prod(shape)) if shape else 1
        u1 = self._gen.random(n)
        u2 = self._gen.random(n)
        z = np.sqrt(-2.0 * np.log1p(-u1)) * np.cos(2.0 * np.pi * u2)
        return z.reshape(shape)

    def spawn(self, key: int) -> "SeededRng":
        """Independent stream for parallel work, derived from (seed, key)."""
        return SeededRng(self.seed ^ (0x9E3779B97F4A7C15 * (int(key) + 1) & 0xFFFFFFFFFFFFFFFF))
