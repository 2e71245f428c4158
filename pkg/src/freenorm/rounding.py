"""Outward-rounded roots of exact rationals.

Certified bounds must never overclaim, so every displayed real is a dyadic
rational obtained by rounding a k-th root down (for lower bounds) or up (for
upper bounds) at a configurable bit precision, while the exact radicand is
kept alongside.  Comparing two rooted quantities never rounds: ``A^(1/p)``
vs ``B^(1/q)`` is decided by cross-powering ``A^q`` vs ``B^p`` over exact
integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

DEFAULT_BITS = 64


def integer_nth_root(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0, k >= 1, exact."""
    if n < 0:
        raise ValueError("negative radicand")
    if k == 1 or n == 0:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def nth_root_lower(value: Fraction, k: int, bits: int = DEFAULT_BITS) -> Fraction:
    """A dyadic rational <= value ** (1/k)."""
    if value < 0:
        raise ValueError("negative radicand")
    scaled = (value.numerator << (k * bits)) // value.denominator
    return Fraction(integer_nth_root(scaled, k), 1 << bits)


def nth_root_upper(value: Fraction, k: int, bits: int = DEFAULT_BITS) -> Fraction:
    """A dyadic rational >= value ** (1/k)."""
    if value < 0:
        raise ValueError("negative radicand")
    num = value.numerator << (k * bits)
    q, rem = divmod(num, value.denominator)
    scaled = q + (1 if rem else 0)
    r = integer_nth_root(scaled, k)
    if r ** k < scaled:
        r += 1
    return Fraction(r, 1 << bits)


def compare_roots(a_rad: Fraction, a_ord: int, b_rad: Fraction, b_ord: int) -> int:
    """Exact sign of a_rad^(1/a_ord) - b_rad^(1/b_ord) via cross-powering."""
    lhs = a_rad ** b_ord
    rhs = b_rad ** a_ord
    return (lhs > rhs) - (lhs < rhs)


@dataclass(frozen=True)
class RootBound:
    """A certified one-sided bound ``radicand ** (1/root_order)``.

    ``rounded`` is the displayed dyadic value, rounded away from the true
    value in the safe direction.
    """

    radicand: Fraction
    root_order: int
    direction: str  # "lower" | "upper"
    rounded: Fraction

    @classmethod
    def lower(cls, radicand: Fraction, root_order: int, bits: int = DEFAULT_BITS) -> "RootBound":
        return cls(radicand, root_order, "lower", nth_root_lower(radicand, root_order, bits))

    @classmethod
    def upper(cls, radicand: Fraction, root_order: int, bits: int = DEFAULT_BITS) -> "RootBound":
        return cls(radicand, root_order, "upper", nth_root_upper(radicand, root_order, bits))

    def exact_le(self, other: "RootBound") -> bool:
        return compare_roots(self.radicand, self.root_order, other.radicand, other.root_order) <= 0

    def exact_value_le(self, value: Fraction) -> bool:
        """True iff radicand^(1/order) <= value, decided exactly."""
        if value < 0:
            return False
        return self.radicand <= value ** self.root_order

    def exact_value_ge(self, value: Fraction) -> bool:
        if value < 0:
            return True
        return self.radicand >= value ** self.root_order

    def __float__(self) -> float:
        return float(self.rounded)


def to_decimal_string(value: Fraction, places: int, direction: str) -> str:
    """Directed decimal rendering of an exact rational."""
    scale = 10 ** places
    num = value.numerator * scale
    q, rem = divmod(num, value.denominator)
    if rem and direction == "up":
        q += 1
    sign = "-" if q < 0 else ""
    q = abs(q)
    whole, frac = divmod(q, scale)
    return f"{sign}{whole}.{frac:0{places}d}" if places else f"{sign}{whole}"
