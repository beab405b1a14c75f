"""Deterministic pseudo-randomness shared by every generation strategy.

All randomness in the framework flows through SplitMix64 so that a given
64-bit seed produces the same byte-identical output on every platform and
Python version. The stdlib ``random`` module is deliberately avoided: its
distribution helpers are not guaranteed stable across releases.
"""

from __future__ import annotations

from typing import Sequence, TypeVar

_MASK64 = (1 << 64) - 1

# FNV-1a 64-bit parameters. BUCKET_HASH_SEED is the published fold seed for
# crash bucketing: stores written by one build are portable to any other.
FNV64_OFFSET = 0xCBF29CE484222325
FNV64_PRIME = 0x100000001B3
BUCKET_HASH_SEED = FNV64_OFFSET

T = TypeVar("T")


def fnv1a(data: bytes, seed: int = FNV64_OFFSET) -> int:
    """Fold ``data`` into a 64-bit FNV-1a hash starting from ``seed``."""
    h = seed & _MASK64
    for b in data:
        h ^= b
        h = (h * FNV64_PRIME) & _MASK64
    return h


def _mix(z: int) -> int:
    # splitmix64 finalizer (Steele, Lea & Flood).
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, *parts: int) -> int:
    """Derive a child seed from a master seed and integer coordinates.

    Used by the campaign to split its master seed per (worker, iteration):
    changing the worker count changes interleaving but never the input
    generated for a given coordinate pair.
    """
    h = _mix(master & _MASK64)
    for p in parts:
        h = _mix(h ^ fnv1a(int(p).to_bytes(8, "little", signed=False)))
    return h


class Rng:
    """splitmix64 stream with the small sampling helpers the generators need."""

    def __init__(self, seed: int) -> None:
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n). Lemire multiply-shift; n must be > 0."""
        if n <= 0:
            raise ValueError("below() needs n > 0")
        return (self.next_u64() * n) >> 64

    def chance(self, p: float) -> bool:
        """True with probability ``p``."""
        if p <= 0.0:
            return False
        if p >= 1.0:
            return True
        return self.next_u64() < int(p * (1 << 64))

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.below(len(seq))]

    def weighted_index(self, weights: Sequence[int]) -> int:
        """Cumulative-sum inversion over positive integer weights."""
        total = 0
        for w in weights:
            total += w
        r = self.below(total)
        acc = 0
        for i, w in enumerate(weights):
            acc += w
            if r < acc:
                return i
        return len(weights) - 1  # unreachable with positive weights

    def geometric(self, p: float = 0.5, floor: int = 1, cap: int = 12) -> int:
        """Geometric count starting at ``floor``, capped at ``cap``."""
        n = floor
        while n < cap and self.chance(p):
            n += 1
        return n
