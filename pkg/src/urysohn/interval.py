"""Closed dyadic intervals used as enclosures of nonnegative reals."""

from __future__ import annotations

from dataclasses import dataclass

from .dyadic import ZERO, Dyadic


@dataclass(frozen=True)
class Interval:
    lo: Dyadic
    hi: Dyadic

    def __post_init__(self):
        object.__setattr__(self, "lo", Dyadic.of(self.lo))
        object.__setattr__(self, "hi", Dyadic.of(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value) -> "Interval":
        value = Dyadic.of(value)
        return cls(value, value)

    @classmethod
    def around(cls, center, radius) -> "Interval":
        """``[center - radius, center + radius]`` clamped at zero."""
        center, radius = Dyadic.of(center), Dyadic.of(radius)
        return cls(center.monus(radius), center + radius)

    @property
    def width(self) -> Dyadic:
        return self.hi - self.lo

    def contains(self, value) -> bool:
        value = Dyadic.of(value)
        return self.lo <= value <= self.hi

    def __contains__(self, value) -> bool:
        return self.contains(value)

    def overlaps(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def within(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def intersect(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), min(self.hi, other.hi))

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def dis(self, other: "Interval") -> "Interval":
        """Enclosure of ``|x - y|`` for x in self and y in other."""
        lo = max(self.lo.monus(other.hi), other.lo.monus(self.hi), ZERO)
        hi = max(self.hi.monus(other.lo), other.hi.monus(self.lo))
        return Interval(lo, hi)

    def sup(self, other: "Interval") -> "Interval":
        return Interval(max(self.lo, other.lo), max(self.hi, other.hi))

    def scale(self, factor) -> "Interval":
        factor = Dyadic.of(factor)
        return Interval(self.lo * factor, self.hi * factor)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"
