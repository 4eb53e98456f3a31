"""Seedable pseudorandom streams used everywhere randomness is needed.

One algorithm is used across the whole package so that runs are
reproducible bit-for-bit on any platform: xorshift64* (a 64-bit
xorshift-family generator), seeded through splitmix64 so that nearby
seeds produce uncorrelated streams.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_SPLITMIX_GAMMA = 0x9E3779B97F4A7C15
_STAR_MULT = 0x2545F4914F6CDD1D
_INV_2_53 = 1.0 / (1 << 53)


def splitmix64(x: int) -> int:
    """One splitmix64 scramble step; maps any 64-bit value to another."""
    x = (x + _SPLITMIX_GAMMA) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix64(*values: int) -> int:
    """Fold any number of integers into a single well-mixed 64-bit seed."""
    acc = 0x9368E53C2F6AF274
    for v in values:
        acc = splitmix64(acc ^ (v & _MASK64))
    return acc


class Xorshift64Star:
    """xorshift64* stream. State is a single nonzero 64-bit word."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        state = splitmix64(seed & _MASK64)
        # all-zero state would be a fixed point
        self.state = state if state != 0 else 0x9E3779B97F4A7C15

    def next_u64(self) -> int:
        x = self.state
        x ^= (x >> 12)
        x ^= (x << 25) & _MASK64
        x ^= (x >> 27)
        self.state = x
        return (x * _STAR_MULT) & _MASK64

    def uniform(self) -> float:
        """Uniform float in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * _INV_2_53

    def randrange(self, n: int) -> int:
        """Uniform integer in [0, n) via multiply-shift."""
        if n <= 0:
            raise ValueError("randrange needs n >= 1")
        return (self.next_u64() * n) >> 64

    def choice(self, seq):
        return seq[self.randrange(len(seq))]

    def getstate(self) -> int:
        return self.state

    def setstate(self, state: int) -> None:
        self.state = state & _MASK64
