"""Independent maximizers used to cross-check the closed form.

``vertex_max`` enumerates every "bounds plus at most one interior value"
configuration and evaluates variances directly from the datasets.
``grid_max`` is brute force for tiny ``n``.  ``hill_climb_max`` is a
floating-point local search that knows nothing about the optimum's shape.
``attained_vertex_max`` handles the variant where the minimum and maximum
must both occur in the data.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Dataset,
    InfeasibleInstanceError,
    ProblemSpec,
    Semantics,
    SemanticsError,
)
from .numbers import DomainError, Interval, MaxVarError, to_rational

__all__ = [
    "Method",
    "OracleResult",
    "GridError",
    "vertex_max",
    "attained_vertex_max",
    "attained_mean_range",
    "attained_min_variance",
    "hill_climb_max",
    "grid_max",
]


class GridError(MaxVarError):
    """The instance cannot be represented on the requested grid."""


class Method(enum.Enum):
    VERTEX_ENUM = "vertex"
    HILL_CLIMB = "hill_climb"
    GRID = "grid"


@dataclass(frozen=True)
class OracleResult:
    best_variance: "Fraction | float"
    argmax: Dataset
    method: Method
    evaluations: int


def _check_bounds_only(spec: ProblemSpec):
    if spec.bounds.semantics is not Semantics.BOUNDS_ONLY:
        raise SemanticsError("use attained_vertex_max for attained-extremes instances")


def _vertex_enum(n: int, total: Fraction, m: Fraction, M: Fraction) -> tuple[Dataset, int]:
    """Best dataset with every value at m or M except at most one.

    ``total`` is the required sum of the values.  Every split
    ``k`` at M / one free value / the rest at m is tried, for ``k = 0..n``.
    """
    width = M - m
    if width == 0:
        return Dataset([m] * n), 1
    # unit-scale sum as P/Q; the free value for k at the top is (P - kQ)/Q
    unit_total = (total - n * m) / width
    P, Q = unit_total.numerator, unit_total.denominator
    best, best_var, evals = None, None, 0
    for k in range(n + 1):
        rest = n - k
        options = []
        if P == k * Q:
            options.append([m] * rest + [M] * k)
        if rest >= 1 and 0 <= P - k * Q <= Q:
            free = m + width * Fraction(P - k * Q, Q)
            options.append([m] * (rest - 1) + [free] + [M] * k)
        for vals in options:
            evals += 1
            ds = Dataset(sorted(vals))
            var = ds.population_variance
            if best_var is None or var > best_var:
                best, best_var = ds, var
    if best is None:
        raise InfeasibleInstanceError("no bound configuration reaches the required sum")
    return best, evals


def vertex_max(spec: ProblemSpec) -> OracleResult:
    """Exact maximum by enumerating the bound configurations."""
    _check_bounds_only(spec)
    m, M = spec.bounds.lower, spec.bounds.upper
    ds, evals = _vertex_enum(spec.n, spec.n * spec.mean, m, M)
    return OracleResult(ds.population_variance, ds, Method.VERTEX_ENUM, evals)


def attained_mean_range(n: int, m, M) -> "Interval | None":
    """Means reachable by ``n`` values in ``[m, M]`` that include both m and M.

    Returns ``None`` when no such dataset exists.
    """
    m, M = to_rational(m), to_rational(M)
    if m == M:
        return Interval.point(m)
    if n == 1:
        return None
    if n == 2:
        return Interval.point((m + M) / 2)
    width = M - m
    return Interval(m + width / n, M - width / n)


def _attained_check(spec: ProblemSpec):
    if spec.bounds.semantics is not Semantics.ATTAINED_EXTREMES:
        raise SemanticsError("attained_vertex_max needs attained-extremes semantics")
    rng = attained_mean_range(spec.n, spec.bounds.lower, spec.bounds.upper)
    if rng is None or spec.mean not in rng:
        raise InfeasibleInstanceError(
            f"mean {spec.mean} cannot be reached by {spec.n} values that include "
            f"both {spec.bounds.lower} and {spec.bounds.upper}"
        )


def attained_vertex_max(spec: ProblemSpec) -> OracleResult:
    """Exact maximum when the data must contain both bounds.

    One value is pinned at m and one at M; the other ``n - 2`` values are
    maximized by vertex enumeration with the residual sum.
    """
    _attained_check(spec)
    m, M = spec.bounds.lower, spec.bounds.upper
    if m == M:
        ds = Dataset([m] * spec.n)
        return OracleResult(Fraction(0), ds, Method.VERTEX_ENUM, 1)
    if spec.n == 2:
        ds = Dataset([m, M])
        return OracleResult(ds.population_variance, ds, Method.VERTEX_ENUM, 1)
    residual = spec.n * spec.mean - m - M
    rest, evals = _vertex_enum(spec.n - 2, residual, m, M)
    ds = Dataset(sorted([m, M, *rest.values]))
    return OracleResult(ds.population_variance, ds, Method.VERTEX_ENUM, evals)


def attained_min_dataset(spec: ProblemSpec) -> Dataset:
    """Least-spread dataset containing both bounds: m, M, and the residual mean elsewhere.

    Ordered ``[m, M, r, ..., r]`` (not sorted) so it lines up with
    :func:`attained_vertex_max` output rearranged the same way.
    """
    _attained_check(spec)
    m, M = spec.bounds.lower, spec.bounds.upper
    if m == M:
        return Dataset([m] * spec.n)
    if spec.n == 2:
        return Dataset([m, M])
    r = (spec.n * spec.mean - m - M) / (spec.n - 2)
    return Dataset([m, M] + [r] * (spec.n - 2))


def attained_min_variance(spec: ProblemSpec) -> Fraction:
    """Smallest population variance of a dataset that contains both bounds."""
    return attained_min_dataset(spec).population_variance


def grid_max(spec: ProblemSpec, q: int) -> OracleResult:
    """Exhaustive search over datasets on the grid ``m + t (M - m)/q``.

    Only sorted tuples are visited since variance is symmetric.  The result
    is a lower bound on the true maximum and equals it whenever the
    maximizer lies on the grid.
    """
    _check_bounds_only(spec)
    if spec.n > 6:
        raise DomainError("grid_max is limited to n <= 6")
    if q < 1:
        raise DomainError("grid resolution must be a positive integer")
    m, M = spec.bounds.lower, spec.bounds.upper
    if m == M:
        ds = Dataset([m] * spec.n)
        return OracleResult(Fraction(0), ds, Method.GRID, 1)
    target = spec.n * spec.unit_mean * q
    if target.denominator != 1:
        raise GridError(f"sum n*c' = {spec.n * spec.unit_mean} is not on the 1/{q} grid")
    target = int(target)
    step = (M - m) / q
    best, best_var, evals = None, None, 0
    for ts in itertools.combinations_with_replacement(range(q + 1), spec.n):
        if sum(ts) != target:
            continue
        evals += 1
        ds = Dataset([m + t * step for t in ts])
        var = ds.population_variance
        if best_var is None or var > best_var:
            best, best_var = ds, var
    return OracleResult(best_var, best, Method.GRID, evals)


def _random_start(rng: random.Random, n: int, c: float, m: float, M: float) -> list[float]:
    x = [rng.uniform(m, M) for _ in range(n)]
    diff = n * c - math.fsum(x)
    if diff > 0:
        slack = [M - v for v in x]
    else:
        slack = [v - m for v in x]
    total = math.fsum(slack)
    if total > 0:
        x = [v + diff * s / total for v, s in zip(x, slack)]
    return [min(max(v, m), M) for v in x]


def _find_improving_pair(x: list[float], eps: float, m: float, M: float):
    # moving delta from i to j changes sum(x^2) by 2*delta*(delta + x_j - x_i)
    n = len(x)
    for i in range(n):
        xi = x[i]
        if xi <= m:
            continue
        for j in range(n):
            xj = x[j]
            if i == j or xj >= M:
                continue
            delta = min(eps, xi - m, M - xj)
            if delta > 0 and delta + xj - xi > 0:
                return i, j
    return None


def _transfer(x: list[float], i: int, j: int, eps: float, m: float, M: float) -> bool:
    xi, xj = x[i], x[j]
    delta = min(eps, xi - m, M - xj)
    if delta <= 0 or delta + xj - xi <= 0:
        return False
    x[i] = m if delta == xi - m else max(xi - delta, m)
    x[j] = M if delta == M - xj else min(xj + delta, M)
    return True


def _climb(x: list[float], rng: random.Random, m: float, M: float,
           max_steps: int) -> tuple[list[float], int]:
    n = len(x)
    eps = (M - m) / 4
    patience = 2 * n
    evals = 0
    failures = 0
    for _ in range(max_steps):
        if failures >= patience:
            # stagnation: fall back to scanning every ordered pair
            evals += n * (n - 1)
            pair = _find_improving_pair(x, eps, m, M)
            if pair is None:
                # no pair improves at eps, hence none at any smaller step;
                # halving eps cannot help
                break
            _transfer(x, *pair, eps, m, M)
            failures = 0
            continue
        i = rng.randrange(n)
        j = rng.randrange(n - 1)
        if j >= i:
            j += 1
        evals += 1
        if _transfer(x, i, j, eps, m, M):
            failures = 0
        else:
            failures += 1
    return x, evals


def hill_climb_max(spec: ProblemSpec, restarts: int = 20, seed: int = 0,
                   max_steps: int = 200_000) -> OracleResult:
    """Random-restart pairwise-transfer ascent in floating point.

    Each step moves up to ``eps`` of mass from one coordinate to another at
    fixed mean (clamped to the bounds) and keeps the move only if the
    variance strictly increases.  ``eps`` is ``(M - m)/4``.  After ``2n``
    rejected random pairs the climb scans every ordered pair; it stops when
    no transfer of size ``eps`` or smaller improves.  Restart ``r`` uses its own
    generator seeded from ``(seed, r)``, so results do not depend on the
    order restarts run in.
    """
    pinned: list[float] = []
    n, total = spec.n, spec.n * spec.mean
    if spec.bounds.semantics is Semantics.ATTAINED_EXTREMES:
        _attained_check(spec)
        if spec.bounds.lower < spec.bounds.upper:
            pinned = [float(spec.bounds.lower), float(spec.bounds.upper)]
            n -= 2
            total -= spec.bounds.lower + spec.bounds.upper
    m, M = float(spec.bounds.lower), float(spec.bounds.upper)
    if n == 0:
        ds = Dataset(sorted(pinned))
        return OracleResult(ds.population_variance, ds, Method.HILL_CLIMB, 0)
    c = float(total / n)
    if M == m or c <= m or c >= M or n == 1:
        ds = Dataset(sorted(pinned + [c] * n))
        return OracleResult(ds.population_variance, ds, Method.HILL_CLIMB, 0)
    best, best_var, evals = None, -math.inf, 0
    for r in range(max(1, restarts)):
        rng = random.Random(seed * 1_000_003 + r)
        x = _random_start(rng, n, c, m, M) if r else [c] * n
        x, used = _climb(x, rng, m, M, max_steps)
        evals += used
        ds = Dataset(sorted(pinned + x))
        var = ds.population_variance
        if var > best_var:
            best, best_var = ds, var
    return OracleResult(best_var, best, Method.HILL_CLIMB, evals)
