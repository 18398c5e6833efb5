"""Deterministic 64-bit PRNG shared by every randomized stage.

All randomness in this package flows through ``SplitMix64`` so that any
implementation language can reproduce the exact streams.  The generator is
the splitmix64 finalizer:

    state := (state + 0x9E3779B97F4A7C15) mod 2^64
    z := state
    z := (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9   (mod 2^64)
    z := (z XOR (z >> 27)) * 0x94D049BB133111EB   (mod 2^64)
    output := z XOR (z >> 31)

Derived draws are defined exactly as:

* ``uniform()``  -> (next() >> 11) / 2^53, a double in [0, 1).
* ``randint(n)`` -> next() mod n.
* ``gaussian()`` -> Box-Muller using two fresh uniforms u1, u2:
  sqrt(-2 ln(1 - u1)) * cos(2 pi u2).  The sine half is discarded; every
  call consumes exactly two uniforms.
* ``shuffle``    -> Fisher-Yates from the top: for i = n-1 .. 1 swap
  element i with element randint(i + 1).
* ``unit_vector(d)`` -> d gaussians, normalized to unit length.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TWO53 = float(1 << 53)


class SplitMix64:
    """Seeded splitmix64 stream; see the module docstring for the contract."""

    def __init__(self, seed: int):
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Double in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) / _TWO53

    def randint(self, n: int) -> int:
        """Integer in [0, n)."""
        if n <= 0:
            raise ValueError(f"randint bound must be positive, got {n}")
        return self.next_u64() % n

    def gaussian(self) -> float:
        """Standard normal draw; consumes exactly two uniforms."""
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)

    def gaussians(self, n: int) -> np.ndarray:
        return np.array([self.gaussian() for _ in range(n)], dtype=np.float64)

    def unit_vector(self, dim: int) -> np.ndarray:
        v = self.gaussians(dim)
        norm = float(np.linalg.norm(v))
        while norm <= 1e-12:  # astronomically unlikely, but stay total
            v = self.gaussians(dim)
            norm = float(np.linalg.norm(v))
        return v / norm

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randint(i + 1)
            items[i], items[j] = items[j], items[i]

    def weighted_index(self, weights: np.ndarray) -> int:
        """Index drawn with probability proportional to nonnegative weights."""
        total = float(weights.sum())
        if total <= 0.0:
            raise ValueError("weighted_index needs a positive total weight")
        r = self.uniform() * total
        acc = 0.0
        for i, w in enumerate(weights):
            acc += float(w)
            if r < acc:
                return i
        return len(weights) - 1

    def spawn(self) -> "SplitMix64":
        """Child generator seeded from this stream."""
        return SplitMix64(self.next_u64())
