"""Exact half-integer arithmetic.

Gleams live in (1/2)Z.  We store twice the value as a plain int so that
all decoration arithmetic is exact; nothing in the package ever touches a
float when handling gleams.
"""

from __future__ import annotations

from fractions import Fraction


class HalfInt:
    """A number of the form k/2 with k an integer, stored as ``twice``."""

    __slots__ = ("twice",)

    def __init__(self, twice: int):
        if not isinstance(twice, int):
            raise TypeError("HalfInt stores twice the value as an int")
        self.twice = twice

    @classmethod
    def from_int(cls, n: int) -> "HalfInt":
        return cls(2 * n)

    @classmethod
    def half(cls) -> "HalfInt":
        return cls(1)

    @classmethod
    def parse(cls, text: str) -> "HalfInt":
        """Parse ``3``, ``-2``, ``1/2`` or ``-7/2``."""
        text = text.strip()
        if "/" in text:
            num, den = text.split("/")
            if den.strip() != "2":
                raise ValueError("half-integers only: denominator must be 2")
            return cls(int(num))
        return cls(2 * int(text))

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0

    @property
    def parity(self) -> int:
        """0 for integers, 1 for strict half-integers."""
        return self.twice % 2

    def as_fraction(self) -> Fraction:
        return Fraction(self.twice, 2)

    def __add__(self, other):
        other = _coerce(other)
        return HalfInt(self.twice + other.twice)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return HalfInt(self.twice - other.twice)

    def __rsub__(self, other):
        other = _coerce(other)
        return HalfInt(other.twice - self.twice)

    def __neg__(self):
        return HalfInt(-self.twice)

    def __abs__(self):
        return HalfInt(abs(self.twice))

    def __mul__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        return HalfInt(self.twice * n)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.twice == other.twice

    def __lt__(self, other):
        return self.twice < _coerce(other).twice

    def __le__(self, other):
        return self.twice <= _coerce(other).twice

    def __hash__(self):
        return hash(("HalfInt", self.twice))

    def __repr__(self):
        return f"HalfInt({self.format()})"

    def format(self) -> str:
        if self.twice % 2 == 0:
            return str(self.twice // 2)
        return f"{self.twice}/2"


def _coerce(value) -> HalfInt:
    if isinstance(value, HalfInt):
        return value
    if isinstance(value, int):
        return HalfInt(2 * value)
    raise TypeError(f"cannot coerce {value!r} to HalfInt")


ZERO = HalfInt(0)
