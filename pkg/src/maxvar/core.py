"""Sharp maximum variance of a bounded dataset with a known mean and length.

On the unit scale, ``n`` values in ``[0, 1]`` with mean ``c`` have population
variance at most::

    c(1 - c) - a(1 - a)/n,      a = frac(n c)

and the bound is attained by ``floor(n c)`` ones, one value ``a`` and zeros.
General bounds ``[m, M]`` follow from the affine map ``x -> (M - m) x + m``.

>>> max_variance_unit(5, Fraction(1, 10))
Fraction(1, 25)
>>> bhatia_davis(Fraction(1, 10), 0, 1)
Fraction(9, 100)
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from fractions import Fraction
from typing import NamedTuple, Sequence

from .numbers import DomainError, MaxVarError, Number, frac_part, to_rational

__all__ = [
    "Semantics",
    "BoundsSpec",
    "ProblemSpec",
    "ExtremalStructure",
    "Dataset",
    "InfeasibleInstanceError",
    "SemanticsError",
    "frac_part",
    "max_variance_unit",
    "max_variance",
    "bhatia_davis",
    "envelope",
    "extremal_structure",
    "witness_dataset",
    "sum_squares_bound",
    "cv_squared_max",
]


class InfeasibleInstanceError(MaxVarError):
    """No dataset satisfies the instance's constraints."""


class SemanticsError(MaxVarError):
    """The operation does not support the requested bound semantics."""


class Semantics(enum.Enum):
    BOUNDS_ONLY = "bounds"
    ATTAINED_EXTREMES = "attained"

    @classmethod
    def parse(cls, s: "str | Semantics") -> "Semantics":
        if isinstance(s, cls):
            return s
        key = str(s).strip().lower()
        for member in cls:
            if key in (member.value, member.name.lower()):
                return member
        raise DomainError(f"unknown semantics {s!r} (expected 'bounds' or 'attained')")


@dataclass(frozen=True)
class BoundsSpec:
    lower: Fraction
    upper: Fraction
    semantics: Semantics = Semantics.BOUNDS_ONLY

    def __post_init__(self):
        object.__setattr__(self, "lower", to_rational(self.lower))
        object.__setattr__(self, "upper", to_rational(self.upper))
        object.__setattr__(self, "semantics", Semantics.parse(self.semantics))
        if self.lower > self.upper:
            raise DomainError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def to_unit(self, x: Fraction) -> Fraction:
        if self.width == 0:
            return Fraction(0)
        return (x - self.lower) / self.width

    def from_unit(self, u: Fraction) -> Fraction:
        return self.width * u + self.lower


@dataclass(frozen=True)
class ProblemSpec:
    """A maximization instance: ``n`` values in ``[m, M]`` with mean ``c``.

    Construction raises :class:`InfeasibleInstanceError` when ``c`` lies
    outside the bounds.
    """

    n: int
    mean: Fraction
    bounds: BoundsSpec = field(default_factory=lambda: BoundsSpec(0, 1))

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "mean", to_rational(self.mean))
        if not self.bounds.lower <= self.mean <= self.bounds.upper:
            raise InfeasibleInstanceError(
                f"mean {self.mean} outside bounds [{self.bounds.lower}, {self.bounds.upper}]"
            )

    @classmethod
    def of(cls, n: int, mean: Number, lower: Number = 0, upper: Number = 1,
           semantics: "str | Semantics" = Semantics.BOUNDS_ONLY) -> "ProblemSpec":
        return cls(n, to_rational(mean), BoundsSpec(lower, upper, semantics))

    @property
    def unit_mean(self) -> Fraction:
        return self.bounds.to_unit(self.mean)


@dataclass(frozen=True)
class ExtremalStructure:
    """Shape of the maximizer on the unit scale.

    ``count_at_max`` values at 1, one interior value ``interior`` when
    ``has_interior``, and ``count_at_min`` values at 0.
    """

    count_at_max: int
    count_at_min: int
    interior: Fraction
    has_interior: bool

    @property
    def n(self) -> int:
        return self.count_at_max + self.count_at_min + int(self.has_interior)

    def unit_values(self) -> list[Fraction]:
        vals = [Fraction(0)] * self.count_at_min
        if self.has_interior:
            vals.append(self.interior)
        vals.extend([Fraction(1)] * self.count_at_max)
        return vals


@dataclass(frozen=True)
class Dataset:
    """An ordered list of values with the usual summary statistics.

    Values may be Fractions (exact statistics) or floats (fsum-based).
    Variance divides by ``n``; the sample variance is the ``n/(n-1)``
    rescaling.
    """

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise DomainError("a dataset needs at least one value")

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    @property
    def n(self) -> int:
        return len(self.values)

    @cached_property
    def is_exact(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.values)

    @cached_property
    def _power_sums(self) -> tuple[int, int, int]:
        # exact values scaled to integers over a common denominator
        den = math.lcm(*(Fraction(v).denominator for v in self.values))
        ints = [int(v * den) for v in self.values]
        return den, sum(ints), sum(i * i for i in ints)

    @cached_property
    def mean(self):
        if self.is_exact:
            den, s1, _ = self._power_sums
            return Fraction(s1, den * self.n)
        return math.fsum(self.values) / self.n

    @cached_property
    def population_variance(self):
        if self.is_exact:
            den, s1, s2 = self._power_sums
            return Fraction(self.n * s2 - s1 * s1, (self.n * den) ** 2)
        mu = self.mean
        return math.fsum((v - mu) ** 2 for v in self.values) / self.n

    @property
    def sample_variance(self):
        if self.n < 2:
            raise DomainError("sample variance needs n >= 2")
        return self.population_variance * self.n / (self.n - 1)

    def sd(self, sample: bool = False) -> float:
        v = self.sample_variance if sample else self.population_variance
        return math.sqrt(v)

    def sorted(self) -> "Dataset":
        return Dataset(sorted(self.values))


def max_variance_unit(n: int, c: Number) -> Fraction:
    """Sharp maximum population variance of ``n`` values in ``[0, 1]`` with mean ``c``."""
    c = to_rational(c)
    if n < 1:
        raise DomainError("n must be >= 1")
    if not 0 <= c <= 1:
        raise DomainError(f"unit-scale mean {c} outside [0, 1]")
    a = frac_part(n * c)
    return c * (1 - c) - a * (1 - a) / n


def _require_bounds_only(spec: ProblemSpec):
    if spec.bounds.semantics is not Semantics.BOUNDS_ONLY:
        raise SemanticsError("attained-extremes instances are handled by maxvar.oracle")


def max_variance(spec: ProblemSpec) -> Fraction:
    """Sharp maximum population variance for a general ``[m, M]`` instance."""
    _require_bounds_only(spec)
    width = spec.bounds.width
    if width == 0:
        return Fraction(0)
    return width**2 * max_variance_unit(spec.n, spec.unit_mean)


def bhatia_davis(c: Number, m: Number, M: Number) -> Fraction:
    """The classical bound ``(M - c)(c - m)``, valid for every ``n``."""
    c, m, M = to_rational(c), to_rational(m), to_rational(M)
    if not m <= c <= M:
        raise DomainError(f"mean {c} outside [{m}, {M}]")
    return (M - c) * (c - m)


def envelope(n: int, c: Number) -> tuple[Fraction, Fraction]:
    """Band ``(c(1-c) - 1/(4n), c(1-c))`` that always contains the sharp bound."""
    c = to_rational(c)
    hi = c * (1 - c)
    return hi - Fraction(1, 4 * n), hi


def extremal_structure(n: int, c: Number) -> ExtremalStructure:
    """Counts and interior value of the unit-scale maximizer."""
    c = to_rational(c)
    if not 0 <= c <= 1:
        raise DomainError(f"unit-scale mean {c} outside [0, 1]")
    total = n * c
    k = math.floor(total)
    a = total - k
    has_interior = a > 0
    return ExtremalStructure(k, n - k - int(has_interior), a, has_interior)


def witness_dataset(spec: ProblemSpec) -> tuple[ExtremalStructure, Dataset]:
    """A dataset attaining :func:`max_variance`, sorted ascending."""
    _require_bounds_only(spec)
    structure = extremal_structure(spec.n, spec.unit_mean)
    values = [spec.bounds.from_unit(u) for u in structure.unit_values()]
    return structure, Dataset(values)


class SumSquaresCheck(NamedTuple):
    lhs: Fraction
    rhs: Fraction
    holds: bool


def sum_squares_bound(values: "Sequence[Number] | Dataset") -> SumSquaresCheck:
    """Check ``sum x_i^2 <= sum x_i - a(1 - a)`` with ``a = frac(sum x_i)``.

    Every dataset in ``[0, 1]^n`` satisfies it; equality holds for the
    extremal datasets.
    """
    xs = [to_rational(v) for v in values]
    if any(not 0 <= x <= 1 for x in xs):
        raise DomainError("sum_squares_bound needs all values in [0, 1]")
    total = sum(xs, Fraction(0))
    a = frac_part(total)
    lhs = sum((x * x for x in xs), Fraction(0))
    rhs = total - a * (1 - a)
    return SumSquaresCheck(lhs, rhs, lhs <= rhs)


def cv_squared_max(mean: Number) -> Fraction:
    """Squared upper bound ``1/mean - 1`` on the coefficient of variation (unit scale).

    The bound holds for every length; take the square root only for display.
    """
    mean = to_rational(mean)
    if mean <= 0:
        raise DomainError("coefficient of variation needs a positive mean")
    if mean > 1:
        raise DomainError(f"unit-scale mean {mean} exceeds 1")
    return 1 / mean - 1
