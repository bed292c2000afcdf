"""Feasibility checks for reported summary statistics.

A report ``(n, mean, sd, min, max)`` is feasible when some dataset of
length ``n`` in ``[min, max]`` has a mean inside the mean's rounding
window and an SD inside the SD's rounding window.  The decision compares
the reported variance window with the largest variance attainable over
the mean window, computed exactly.

For a fixed mean the bounds-only feasible set is convex and variance is
continuous on it, so every variance between 0 and the maximum is
attainable.  Witnesses are built on exactly that argument: the extremal
dataset is shrunk toward the constant dataset (mean preserved) until its
variance hits the target.

Rounding windows are modelled as closed half-up intervals of total width
``10**-decimals`` around the literal.  This is a modelling choice.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Dataset,
    ProblemSpec,
    Semantics,
    extremal_structure,
    max_variance_unit,
    witness_dataset,
)
from .numbers import DomainError, Interval, MaxVarError, Number, RoundedValue, to_rational
from .oracle import (
    attained_mean_range,
    attained_min_dataset,
    attained_vertex_max,
)

__all__ = [
    "Convention",
    "Status",
    "ReportedStats",
    "FeasibilityVerdict",
    "EmptyWindowError",
    "max_over_mean_window",
    "check_variance_window",
    "check",
    "cv_check",
    "VARIANCE_TOLERANCE",
]

VARIANCE_TOLERANCE = Fraction(1, 10**18)


class EmptyWindowError(MaxVarError):
    """The mean window does not meet the bounds."""


class Convention(enum.Enum):
    POPULATION = "population"
    SAMPLE = "sample"

    @classmethod
    def parse(cls, s: "str | Convention") -> "Convention":
        if isinstance(s, cls):
            return s
        key = str(s).strip().lower()
        aliases = {"population": cls.POPULATION, "pop": cls.POPULATION,
                   "sample": cls.SAMPLE}
        if key not in aliases:
            raise DomainError(f"unknown variance convention {s!r}")
        return aliases[key]


class Status(enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    INVALID_INPUT = "invalid_input"


@dataclass(frozen=True)
class ReportedStats:
    n: int
    mean: RoundedValue
    sd: RoundedValue
    lower: Fraction
    upper: Fraction
    convention: Convention = Convention.POPULATION
    semantics: Semantics = Semantics.BOUNDS_ONLY

    @classmethod
    def of(cls, n: int, mean: "str | RoundedValue", sd: "str | RoundedValue",
           lower: Number, upper: Number, convention="population", semantics="bounds",
           *, exact_mean: bool = False, exact_sd: bool = False,
           mean_decimals: int | None = None, sd_decimals: int | None = None) -> "ReportedStats":
        if not isinstance(mean, RoundedValue):
            mean = RoundedValue.parse(mean, mean_decimals, exact_mean)
        if not isinstance(sd, RoundedValue):
            sd = RoundedValue.parse(sd, sd_decimals, exact_sd)
        return cls(n, mean, sd, to_rational(lower), to_rational(upper),
                   Convention.parse(convention), Semantics.parse(semantics))

    def problems(self) -> list[str]:
        out = []
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            out.append("n must be a positive integer")
        elif self.convention is Convention.SAMPLE and self.n < 2:
            out.append("sample convention needs n >= 2")
        if self.lower > self.upper:
            out.append("min exceeds max")
        if self.sd.value < 0:
            out.append("sd is negative")
        return out


@dataclass(frozen=True)
class FeasibilityVerdict:
    """Outcome of a feasibility check.

    Variances are in the report's convention.  ``margin`` is
    ``max_attainable_variance - reported_variance_window.lo``; it is negative
    exactly when the upper side fails.  ``min_attainable_variance`` is 0
    except under attained-extremes semantics.
    """

    status: Status
    max_attainable_variance: "Fraction | None" = None
    reported_variance_window: "Interval | None" = None
    witness: "Dataset | None" = None
    margin: "Fraction | None" = None
    min_attainable_variance: "Fraction | None" = None
    argmean: "Fraction | None" = None
    reason: str = ""

    @property
    def feasible(self) -> bool:
        return self.status is Status.FEASIBLE


def _clip(window: Interval, m: Fraction, M: Fraction) -> Interval:
    clipped = window.intersect(Interval(m, M))
    if clipped is None:
        raise EmptyWindowError(f"mean window [{window.lo}, {window.hi}] misses [{m}, {M}]")
    return clipped


def _mean_candidates(n: int, window: Interval, m: Fraction, M: Fraction) -> list[Fraction]:
    """Window endpoints plus the breakpoints ``m + (j/n)(M - m)`` inside the window."""
    if m == M:
        return [m]
    width = M - m
    u_lo, u_hi = (window.lo - m) / width, (window.hi - m) / width
    cands = {window.lo, window.hi}
    j = math.ceil(u_lo * n)
    while Fraction(j, n) <= u_hi:
        cands.add(m + width * Fraction(j, n))
        j += 1
    return sorted(cands)


def _bounds_max(n: int, c: Fraction, m: Fraction, M: Fraction) -> Fraction:
    if m == M:
        return Fraction(0)
    return (M - m) ** 2 * max_variance_unit(n, (c - m) / (M - m))


def max_over_mean_window(n: int, window: Interval, m: Number, M: Number) -> tuple[Fraction, Fraction]:
    """Largest sharp maximum variance over means in ``window``, with an attaining mean.

    On the unit scale ``g(c) = c(1-c) - a(1-a)/n`` is a quadratic in ``c``
    between consecutive breakpoints ``j/n`` with second derivative
    ``2(n-1) >= 0``, so each piece peaks at one of its ends.  Candidates are
    therefore the clipped window ends and the breakpoints inside it; ties go
    to the smallest mean.
    """
    m, M = to_rational(m), to_rational(M)
    window = _clip(window, m, M)
    best, arg = None, None
    for c in _mean_candidates(n, window, m, M):
        v = _bounds_max(n, c, m, M)
        if best is None or v > best:
            best, arg = v, c
    return best, arg


def _spec(n, c, m, M, semantics) -> ProblemSpec:
    return ProblemSpec.of(n, c, m, M, semantics)


def _variance_range(n, c, m, M, semantics) -> tuple[Fraction, Fraction]:
    """Population variances attainable at mean ``c``: ``[vmin, vmax]``."""
    if semantics is Semantics.BOUNDS_ONLY:
        return Fraction(0), _bounds_max(n, c, m, M)
    spec = _spec(n, c, m, M, semantics)
    return attained_min_dataset(spec).population_variance, attained_vertex_max(spec).best_variance


def _extreme_pair(n, c, m, M, semantics) -> tuple[list[Fraction], list[Fraction]]:
    """Aligned (least spread, most spread) datasets with mean ``c``."""
    if semantics is Semantics.BOUNDS_ONLY:
        _, hi = witness_dataset(_spec(n, c, m, M, semantics))
        return [c] * n, list(hi.values)
    spec = _spec(n, c, m, M, semantics)
    lo = list(attained_min_dataset(spec).values)
    rest = list(attained_vertex_max(spec).argmax.values)
    if m != M and n >= 2:
        rest.remove(m)
        rest.remove(M)
        hi = [m, M] + rest
    else:
        hi = rest
    return lo, hi


def _variance_along(lo: list[Fraction], hi: list[Fraction], t: Fraction) -> tuple[Dataset, Fraction]:
    ds = Dataset([a + t * (b - a) for a, b in zip(lo, hi)])
    return ds, ds.population_variance


def _interpolate_to_variance(lo, hi, target: Fraction, upper: Fraction,
                             tol: Fraction = VARIANCE_TOLERANCE) -> Dataset:
    """Point on the segment ``lo -> hi`` whose variance is within ``tol`` of ``target``.

    Needs ``var(lo) <= target <= var(hi)``.  Bisection keeps that bracket;
    the upper end is returned unless it overshoots ``upper``.
    """
    t_lo, t_hi = Fraction(0), Fraction(1)
    ds_lo, v_lo = _variance_along(lo, hi, t_lo)
    ds_hi, v_hi = _variance_along(lo, hi, t_hi)
    if v_lo == target:
        return ds_lo
    if v_hi == target:
        return ds_hi
    while v_hi - v_lo > tol:
        mid = (t_lo + t_hi) / 2
        ds_mid, v_mid = _variance_along(lo, hi, mid)
        if v_mid == target:
            return ds_mid
        if v_mid < target:
            t_lo, ds_lo, v_lo = mid, ds_mid, v_mid
        else:
            t_hi, ds_hi, v_hi = mid, ds_mid, v_mid
    return ds_hi if v_hi <= upper else ds_lo


def _pick_mean(n, window: Interval, m, M, semantics, var_window: Interval,
               preferred: Fraction, candidates: list[Fraction]):
    """First mean (preferred, then candidates, then a grid) with a usable variance range."""
    grid = [window.lo + window.width * Fraction(i, 256) for i in range(257)]
    for c in [window.clamp(preferred), *candidates, *grid]:
        vmin, vmax = _variance_range(n, c, m, M, semantics)
        lo, hi = max(var_window.lo, vmin), min(var_window.hi, vmax)
        if lo <= hi:
            return c, lo, hi
    return None


def check_variance_window(n: int, mean_window: Interval, variance_window: Interval,
                          lower: Number, upper: Number,
                          convention: "Convention | str" = Convention.POPULATION,
                          semantics: "Semantics | str" = Semantics.BOUNDS_ONLY,
                          preferred_mean: Number | None = None,
                          preferred_variance: Number | None = None) -> FeasibilityVerdict:
    """Decide feasibility from a mean window and a variance window.

    ``variance_window`` is in ``convention``.  The preferred mean and
    variance steer the witness toward the reported point values.
    """
    m, M = to_rational(lower), to_rational(upper)
    convention = Convention.parse(convention)
    semantics = Semantics.parse(semantics)
    if convention is Convention.SAMPLE and n < 2:
        return FeasibilityVerdict(Status.INVALID_INPUT, reason="sample convention needs n >= 2")
    if m > M:
        return FeasibilityVerdict(Status.INVALID_INPUT, reason="min exceeds max")
    to_reported = Fraction(n, n - 1) if convention is Convention.SAMPLE else Fraction(1)
    try:
        window = _clip(mean_window, m, M)
    except EmptyWindowError as e:
        return FeasibilityVerdict(Status.INVALID_INPUT, reported_variance_window=variance_window,
                                  reason=str(e))

    if semantics is Semantics.ATTAINED_EXTREMES:
        reachable = attained_mean_range(n, m, M)
        window = window.intersect(reachable) if reachable is not None else None
        if window is None:
            return FeasibilityVerdict(
                Status.INFEASIBLE, reported_variance_window=variance_window,
                reason="no mean in the window is reachable by data containing both min and max")

    candidates = _mean_candidates(n, window, m, M)
    pop_max, argmean = None, None
    for c in candidates:
        v = _variance_range(n, c, m, M, semantics)[1]
        if pop_max is None or v > pop_max:
            pop_max, argmean = v, c
    if semantics is Semantics.ATTAINED_EXTREMES:
        # vmin is a convex quadratic in c with its vertex at the midpoint
        c_min = window.clamp((m + M) / 2)
        pop_min = _variance_range(n, c_min, m, M, semantics)[0]
        candidates.append(c_min)
    else:
        pop_min = Fraction(0)

    max_rep, min_rep = pop_max * to_reported, pop_min * to_reported
    margin = max_rep - variance_window.lo
    if variance_window.lo > max_rep:
        return FeasibilityVerdict(Status.INFEASIBLE, max_rep, variance_window, None, margin,
                                  min_rep, argmean, "reported variance exceeds the attainable maximum")
    if variance_window.hi < min_rep:
        return FeasibilityVerdict(Status.INFEASIBLE, max_rep, variance_window, None,
                                  variance_window.hi - min_rep, min_rep, argmean,
                                  "reported variance is below the attainable minimum")

    pop_window = Interval(variance_window.lo / to_reported, variance_window.hi / to_reported)
    preferred_c = to_rational(preferred_mean) if preferred_mean is not None else argmean
    picked = _pick_mean(n, window, m, M, semantics, pop_window, preferred_c, candidates)
    witness = None
    reason = ""
    if picked is None:
        reason = "feasible by the interval argument, but no rational witness mean was found"
    else:
        c, lo, hi = picked
        pref_v = (to_rational(preferred_variance) / to_reported
                  if preferred_variance is not None else hi)
        target = min(max(pref_v, lo), hi)
        a, b = _extreme_pair(n, c, m, M, semantics)
        witness = _interpolate_to_variance(a, b, target, hi).sorted()
    return FeasibilityVerdict(Status.FEASIBLE, max_rep, variance_window, witness, margin,
                              min_rep, argmean, reason)


def sd_to_variance_window(sd: RoundedValue) -> Interval:
    w = sd.window
    return Interval(max(w.lo, Fraction(0)) ** 2, w.hi**2)


def check(stats: ReportedStats) -> FeasibilityVerdict:
    """Decide whether ``stats`` could come from a real dataset."""
    problems = stats.problems()
    if problems:
        return FeasibilityVerdict(Status.INVALID_INPUT, reason="; ".join(problems))
    return check_variance_window(
        stats.n, stats.mean.window, sd_to_variance_window(stats.sd),
        stats.lower, stats.upper, stats.convention, stats.semantics,
        preferred_mean=stats.mean.value, preferred_variance=stats.sd.value**2,
    )


def _cv_witness(c: Fraction, target_cv2: Fraction) -> Dataset:
    """Shortest unit-scale dataset with mean ``c`` and squared CV ``target_cv2``."""
    need = target_cv2 * c * c
    n = 1
    # n = denominator of c makes n c an integer, where the bound is tight
    while max_variance_unit(n, c) < need and n < c.denominator:
        n += 1
    structure = extremal_structure(n, c)
    hi = structure.unit_values()
    return _interpolate_to_variance([c] * n, hi, need, need).sorted()


def cv_check(mean: RoundedValue, cv: RoundedValue) -> FeasibilityVerdict:
    """Feasibility of a (mean, CV) report for data in ``[0, 1]`` of unknown length.

    The "variance" fields of the verdict hold squared CVs: the attainable
    maximum is ``1/mean - 1`` at the smallest mean in the window.
    """
    w = mean.window
    if w.lo <= 0:
        raise DomainError("mean window touches 0; the CV is unbounded there")
    if w.lo > 1:
        raise DomainError("mean window lies above 1 on the unit scale")
    window = Interval(w.lo, min(w.hi, Fraction(1)))
    cv_w = cv.window
    cv2_window = Interval(max(cv_w.lo, Fraction(0)) ** 2, max(cv_w.hi, Fraction(0)) ** 2)
    best = 1 / window.lo - 1
    margin = best - cv2_window.lo
    if cv2_window.lo > best:
        return FeasibilityVerdict(Status.INFEASIBLE, best, cv2_window, None, margin,
                                  Fraction(0), window.lo, "reported CV exceeds the bound")
    c = window.clamp(mean.value)
    if 1 / c - 1 < cv2_window.lo:
        c = window.lo
    hi = min(cv2_window.hi, 1 / c - 1)
    target = min(max(cv.value**2, cv2_window.lo), hi)
    return FeasibilityVerdict(Status.FEASIBLE, best, cv2_window, _cv_witness(c, target), margin,
                              Fraction(0), window.lo)
