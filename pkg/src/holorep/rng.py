"""SplitMix64 probe generator.

Random probes (test polynomials, sample points) come from this generator
rather than numpy's so that the streams are fully specified:

* state advances by ``0x9E3779B97F4A7C15`` (mod 2**64) per draw;
* output ``z`` is mixed as ``z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
  z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31``;
* ``uniform()`` is ``(next >> 11) * 2**-53`` in ``[0, 1)``;
* ``normal()`` is Box-Muller on two uniforms ``u1, u2`` using
  ``sqrt(-2 log(1 - u1)) * cos(2 pi u2)`` (the sine branch is discarded);
* ``complex_normal()`` is ``(normal() + 1j * normal()) / sqrt(2)``.
"""
from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    def __init__(self, seed: int = 0):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * (self.next_u64() >> 11) * 2.0**-53

    def normal(self) -> float:
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log1p(-u1)) * math.cos(2.0 * math.pi * u2)

    def complex_normal(self) -> complex:
        return complex(self.normal(), self.normal()) / math.sqrt(2.0)

    def complex_normals(self, size: int) -> np.ndarray:
        return np.array([self.complex_normal() for _ in range(size)], dtype=np.complex128)

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]`` (modulo bias is irrelevant here)."""
        return lo + self.next_u64() % (hi - lo + 1)

    def spawn(self) -> "SplitMix64":
        return SplitMix64(self.next_u64())
