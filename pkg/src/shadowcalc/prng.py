"""Deterministic pseudo-randomness.

Every random choice in the package flows from one 64-bit seed through
SplitMix64 (Steele, Lea, Flood 2014).  The generator is implemented here
rather than taken from ``random`` so that output bytes are identical
across Python builds and versions.
"""

from __future__ import annotations

MASK = (1 << 64) - 1


class SplitMix64:
    """The SplitMix64 generator; ~2 lines of state-update, fully portable."""

    def __init__(self, seed: int):
        self.state = seed & MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection (n must be positive)."""
        if n <= 0:
            raise ValueError("below() needs a positive bound")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            v = self.next_u64()
            if v < limit:
                return v % n

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi] inclusive."""
        return lo + self.below(hi - lo + 1)

    def choice(self, seq):
        if not seq:
            raise ValueError("choice from empty sequence")
        return seq[self.below(len(seq))]

    def shuffle(self, seq: list) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.below(i + 1)
            seq[i], seq[j] = seq[j], seq[i]

    def fork(self, label: str) -> "SplitMix64":
        """Derive an independent stream for a named sub-task."""
        h = 0xCBF29CE484222325
        for ch in label.encode():
            h = ((h ^ ch) * 0x100000001B3) & MASK
        return SplitMix64(self.next_u64() ^ h)
