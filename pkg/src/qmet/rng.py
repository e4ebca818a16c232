"""Seeded linear congruential generator.

All randomized instance generation goes through :class:`Lcg` so that the
sampled spaces, arrows and monoids are reproducible from a seed alone, in
any language.  Constants are Knuth's MMIX ones:

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2**64

and every draw uses the high 32 bits of the new state.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, TypeVar

T = TypeVar("T")

MULTIPLIER = 6364136223846793005
INCREMENT = 1442695040888963407
MASK64 = (1 << 64) - 1


class Lcg:
    def __init__(self, seed: int = 0):
        self.state = seed & MASK64

    def next_u32(self) -> int:
        self.state = (MULTIPLIER * self.state + INCREMENT) & MASK64
        return self.state >> 32

    def below(self, n: int) -> int:
        """Uniform-ish integer in ``range(n)`` (modulo reduction of 32 bits)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u32() % n

    def chance(self, num: int, den: int) -> bool:
        return self.below(den) < num

    def choice(self, seq: Sequence[T]) -> T:
        return seq[self.below(len(seq))]

    def shuffle(self, items: list) -> list:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def fraction(self, max_num: int = 8, den: int = 4) -> Fraction:
        return Fraction(self.below(max_num * den + 1), den)

    def fork(self) -> "Lcg":
        return Lcg(self.next_u32() << 32 | self.next_u32())
