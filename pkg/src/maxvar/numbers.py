"""Exact number handling: parsing, rounding windows, and decimal rendering.

Everything numeric in the package is a :class:`fractions.Fraction`.  Floats
are accepted at entry points and converted through their shortest ``repr``,
so ``0.1`` becomes ``1/10`` rather than the binary approximation.  The
presentation tolerance for such conversions is 1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[int, float, str, Fraction, Decimal]

FLOAT_TOLERANCE = 1e-12


class MaxVarError(ValueError):
    """Base class for errors raised by this package."""


class DomainError(MaxVarError):
    """An argument lies outside the domain of the operation."""


class ParseError(MaxVarError):
    """A numeric literal could not be parsed."""


def to_rational(x: Number) -> Fraction:
    """Convert ``x`` to an exact Fraction.

    Strings are parsed as decimal (scientific notation allowed) or ``p/q``
    literals; floats go through ``repr`` so that ``0.1 -> 1/10``.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ParseError(f"not a number: {x!r}")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ParseError(f"not a finite number: {x!r}")
        return Fraction(repr(x))
    if isinstance(x, Decimal):
        if not x.is_finite():
            raise ParseError(f"not a finite number: {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        try:
            if "/" in s:
                return Fraction(s)
            d = Decimal(s)
        except (ValueError, ZeroDivisionError, InvalidOperation):
            raise ParseError(f"unparseable number: {x!r}") from None
        if not d.is_finite():
            raise ParseError(f"not a finite number: {x!r}")
        return Fraction(d)
    raise ParseError(f"unsupported numeric type: {type(x).__name__}")


def frac_part(r: Number) -> Fraction:
    """Return ``r - floor(r)``, always in ``[0, 1)``."""
    r = to_rational(r)
    return r - math.floor(r)


@dataclass(frozen=True)
class Interval:
    """Closed interval ``[lo, hi]`` of rationals."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        object.__setattr__(self, "lo", to_rational(self.lo))
        object.__setattr__(self, "hi", to_rational(self.hi))
        if self.lo > self.hi:
            raise DomainError(f"empty interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: Number) -> "Interval":
        x = to_rational(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= to_rational(x) <= self.hi

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def clamp(self, x: Fraction) -> Fraction:
        return min(max(x, self.lo), self.hi)


@dataclass(frozen=True)
class RoundedValue:
    """A reported decimal together with the interval of true values it covers.

    The window is the half-up rounding window ``value +/- 5 * 10**-(decimals+1)``,
    closed at both ends; ``exact=True`` collapses it to the point ``value``.
    """

    literal: str
    value: Fraction
    decimals: int
    exact: bool = False

    @classmethod
    def parse(cls, literal: str, decimals: int | None = None, exact: bool = False) -> "RoundedValue":
        literal = str(literal).strip()
        if "/" in literal:
            # a p/q literal carries no rounding information
            return cls(literal, to_rational(literal), 0, True)
        try:
            d = Decimal(literal)
        except InvalidOperation:
            raise ParseError(f"unparseable number: {literal!r}") from None
        if not d.is_finite():
            raise ParseError(f"not a finite number: {literal!r}")
        if decimals is None:
            decimals = max(0, -d.as_tuple().exponent)
        if decimals < 0:
            raise DomainError("decimals must be >= 0")
        return cls(literal, Fraction(d), int(decimals), exact)

    @property
    def half_width(self) -> Fraction:
        if self.exact:
            return Fraction(0)
        return Fraction(1, 2 * 10**self.decimals)

    @property
    def window(self) -> Interval:
        h = self.half_width
        return Interval(self.value - h, self.value + h)

    def __str__(self):
        return self.literal


def format_decimal(r: Number, sig: int = 12) -> str:
    """Render ``r`` as a plain decimal string.

    Rounds to ``sig`` significant digits, but never to fewer than 12
    fractional digits, so re-parsing the output is always within 5e-13 of
    the exact value.  Trailing zeros are stripped.
    """
    r = to_rational(r)
    if r == 0:
        return "0"
    exponent = math.floor(math.log10(abs(r.numerator)) - math.log10(r.denominator))
    places = max(12, sig - 1 - exponent)
    scaled = round(r * 10**places)
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled)).rjust(places + 1, "0")
    whole, frac = digits[:-places], digits[-places:].rstrip("0")
    if not frac:
        out = whole
    else:
        out = f"{whole}.{frac}"
    return "0" if out.strip("0.") == "" else sign + out


def format_rational(r: Number) -> str:
    r = to_rational(r)
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"
