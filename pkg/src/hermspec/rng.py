"""Seeded splitmix-style 64-bit PRNG for reproducible random test functions.

A tiny self-contained generator so that CSV outputs are byte-identical across
platforms and numpy versions.
"""

import numpy as np

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed):
        self.state = int(seed) & _MASK

    def next_u64(self):
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self):
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * 2.0 ** -53

    def uniform_symmetric(self, n):
        """Array of n uniform doubles in [-1, 1]."""
        return np.array([2.0 * self.uniform() - 1.0 for _ in range(n)])

    def unit_coeffs(self, n):
        """Uniform coefficients on [-1, 1], normalized to unit Euclidean norm."""
        c = self.uniform_symmetric(n)
        nrm = np.linalg.norm(c)
        if nrm == 0.0:  # pragma: no cover - probability 0
            c[0] = 1.0
            nrm = 1.0
        return c / nrm
