"""Exact nonnegative dyadic rationals, ``mantissa / 2**exponent``."""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

_LITERAL = re.compile(r"\s*(\d+)\s*(?:/\s*2\s*\^\s*(\d+))?\s*\Z")

DyadicLike = Union["Dyadic", int]


class Dyadic:
    """A nonnegative dyadic rational kept in normalized form.

    The exponent is zero or the mantissa is odd, so equal values have equal
    fields and structural equality is value equality.
    """

    __slots__ = ("mantissa", "exponent")

    mantissa: int
    exponent: int

    def __init__(self, mantissa: int = 0, exponent: int = 0):
        if mantissa < 0 or exponent < 0:
            raise ValueError(f"dyadic fields must be nonnegative, got {mantissa}/2^{exponent}")
        if mantissa == 0:
            exponent = 0
        elif exponent:
            shift = min((mantissa & -mantissa).bit_length() - 1, exponent)
            mantissa >>= shift
            exponent -= shift
        object.__setattr__(self, "mantissa", mantissa)
        object.__setattr__(self, "exponent", exponent)

    def __setattr__(self, name, value):
        raise AttributeError("Dyadic is immutable")

    # construction -------------------------------------------------------

    @classmethod
    def of(cls, value: "DyadicLike | Fraction | str") -> "Dyadic":
        """Coerce an int, Fraction, literal string or Dyadic into a Dyadic."""
        if isinstance(value, Dyadic):
            return value
        if isinstance(value, bool):
            raise TypeError("bool is not a dyadic")
        if isinstance(value, int):
            return cls(value, 0)
        if isinstance(value, Fraction):
            return cls.from_fraction(value)
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"cannot make a Dyadic from {type(value).__name__}")

    @classmethod
    def from_fraction(cls, q: Fraction) -> "Dyadic":
        den = q.denominator
        if q < 0 or den & (den - 1):
            raise ValueError(f"{q} is not a nonnegative dyadic rational")
        return cls(q.numerator, den.bit_length() - 1)

    @classmethod
    def parse(cls, text: str) -> "Dyadic":
        """Parse ``m/2^k`` or a bare ``m``."""
        match = _LITERAL.match(text)
        if match is None:
            raise ValueError(f"not a dyadic literal: {text!r}")
        return cls(int(match.group(1)), int(match.group(2) or 0))

    @classmethod
    def pow2(cls, n: int) -> "Dyadic":
        """Return 2**-n for n >= 0, or 2**|n| for negative n."""
        return cls(1, n) if n >= 0 else cls(1 << -n, 0)

    # conversions --------------------------------------------------------

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.exponent)

    def __float__(self) -> float:
        return self.mantissa / (1 << self.exponent)

    def __str__(self) -> str:
        return f"{self.mantissa}/2^{self.exponent}"

    def __repr__(self) -> str:
        return f"Dyadic('{self}')"

    # arithmetic ---------------------------------------------------------

    def _aligned(self, other: "Dyadic") -> tuple[int, int, int]:
        e1, e2 = self.exponent, other.exponent
        if e1 == e2:
            return self.mantissa, other.mantissa, e1
        if e1 > e2:
            return self.mantissa, other.mantissa << (e1 - e2), e1
        return self.mantissa << (e2 - e1), other.mantissa, e2

    def __add__(self, other: DyadicLike) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        m1, m2, e = self._aligned(other)
        return Dyadic(m1 + m2, e)

    __radd__ = __add__

    def __sub__(self, other: DyadicLike) -> "Dyadic":
        """Exact subtraction; raises ValueError if the result would be negative."""
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        m1, m2, e = self._aligned(other)
        if m2 > m1:
            raise ValueError(f"{self} - {other} is negative")
        return Dyadic(m1 - m2, e)

    def monus(self, other: DyadicLike) -> "Dyadic":
        """Truncated subtraction ``max(self - other, 0)``."""
        other = _coerce(other)
        m1, m2, e = self._aligned(other)
        return Dyadic(m1 - m2, e) if m1 > m2 else ZERO

    def dis(self, other: DyadicLike) -> "Dyadic":
        """Absolute difference ``|self - other|``."""
        other = _coerce(other)
        m1, m2, e = self._aligned(other)
        return Dyadic(abs(m1 - m2), e)

    def __mul__(self, other: DyadicLike) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def halve(self) -> "Dyadic":
        return Dyadic(self.mantissa, self.exponent + 1)

    def scale2(self, n: int) -> "Dyadic":
        """Multiply by 2**n (n may be negative)."""
        if n >= 0:
            if self.exponent >= n:
                return Dyadic(self.mantissa, self.exponent - n)
            return Dyadic(self.mantissa << (n - self.exponent), 0)
        return Dyadic(self.mantissa, self.exponent - n)

    def floor_to(self, n: int) -> "Dyadic":
        """Largest multiple of 2**-n not above self."""
        if self.exponent <= n:
            return self
        return Dyadic(self.mantissa >> (self.exponent - n), n)

    def ceil_to(self, n: int) -> "Dyadic":
        """Smallest multiple of 2**-n not below self."""
        if self.exponent <= n:
            return self
        return Dyadic(-(-self.mantissa >> (self.exponent - n)), n)

    # comparison ---------------------------------------------------------

    def _cmp(self, other: "Dyadic") -> int:
        m1, m2, _ = self._aligned(other)
        return (m1 > m2) - (m1 < m2)

    def __eq__(self, other) -> bool:
        if isinstance(other, Dyadic):
            return self.mantissa == other.mantissa and self.exponent == other.exponent
        if isinstance(other, int) and not isinstance(other, bool):
            return self.exponent == 0 and self.mantissa == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.exponent == 0:
            return hash(self.mantissa)
        return hash((self.mantissa, self.exponent))

    def __lt__(self, other: DyadicLike) -> bool:
        other = _coerce(other)
        return other is not NotImplemented and self._cmp(other) < 0

    def __le__(self, other: DyadicLike) -> bool:
        other = _coerce(other)
        return other is not NotImplemented and self._cmp(other) <= 0

    def __gt__(self, other: DyadicLike) -> bool:
        other = _coerce(other)
        return other is not NotImplemented and self._cmp(other) > 0

    def __ge__(self, other: DyadicLike) -> bool:
        other = _coerce(other)
        return other is not NotImplemented and self._cmp(other) >= 0

    def __bool__(self) -> bool:
        return self.mantissa != 0

    def __reduce__(self):
        return (Dyadic, (self.mantissa, self.exponent))


def _coerce(value):
    if isinstance(value, Dyadic):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Dyadic(value, 0)
    return NotImplemented


ZERO = Dyadic(0)
ONE = Dyadic(1)


def dmax(values, default: Dyadic = ZERO) -> Dyadic:
    """Maximum of an iterable of dyadics; the supremum of nothing is ``default``."""
    best = default
    for v in values:
        if v > best:
            best = v
    return best
