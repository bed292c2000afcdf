from fractions import Fraction

import pytest

from maxvar.core import (
    BoundsSpec,
    Dataset,
    InfeasibleInstanceError,
    ProblemSpec,
    SemanticsError,
    bhatia_davis,
    cv_squared_max,
    envelope,
    extremal_structure,
    max_variance,
    max_variance_unit,
    sum_squares_bound,
    witness_dataset,
)
from maxvar.numbers import DomainError

F = Fraction


def direct_variance(values):
    """Population variance from the definition, sum (x - mean)^2 / n."""
    values = [F(v) for v in values]
    mu = sum(values) / len(values)
    return sum((v - mu) ** 2 for v in values) / len(values)


class TestMaxVarianceUnit:
    def test_five_values_mean_tenth(self):
        assert max_variance_unit(5, F(1, 10)) == F(1, 25)

    def test_integer_nc(self):
        assert max_variance_unit(4, F(1, 2)) == F(1, 4)

    def test_three_values_half(self):
        # enumerating k ones, one forced value, zeros: only (0, 1/2, 1) fits
        expected = direct_variance([0, F(1, 2), 1])
        assert expected == F(1, 6)
        assert max_variance_unit(3, F(1, 2)) == expected

    @pytest.mark.parametrize("c", [F(0), F(1, 3), F(1, 2), F(9, 10), F(1)])
    def test_single_value_has_zero_variance(self, c):
        assert max_variance_unit(1, c) == 0

    @pytest.mark.parametrize("c", [F(-1, 10), F(11, 10)])
    def test_domain(self, c):
        with pytest.raises(DomainError):
            max_variance_unit(5, c)

    def test_accepts_decimal_string(self):
        assert max_variance_unit(5, "0.1") == F(1, 25)


class TestMaxVariance:
    def test_unit_interval(self):
        assert max_variance(ProblemSpec.of(5, F(1, 10), 0, 1)) == F(1, 25)

    def test_mean_at_lower_bound(self):
        assert max_variance(ProblemSpec.of(5, 2, 2, 10)) == 0

    def test_affine_image(self):
        assert direct_variance([2, 2, 2, 2, 6]) == F(64, 25)
        assert max_variance(ProblemSpec.of(5, F(14, 5), 2, 10)) == F(64, 25)

    def test_degenerate_bounds(self):
        assert max_variance(ProblemSpec.of(4, 3, 3, 3)) == 0

    def test_mean_outside_bounds(self):
        with pytest.raises(InfeasibleInstanceError):
            ProblemSpec.of(5, F(11), 2, 10)

    def test_attained_semantics_refused(self):
        with pytest.raises(SemanticsError):
            max_variance(ProblemSpec.of(5, F(1, 2), 0, 1, "attained"))

    def test_closed_form_matches_expanded(self):
        # (M - c)(c - m) - (M - m)^2 a(1 - a)/n
        n, c, m, M = 7, F(13, 4), F(-1), F(6)
        a = (n * (c - m) / (M - m)) % 1
        assert max_variance(ProblemSpec.of(n, c, m, M)) == (M - c) * (c - m) - (M - m) ** 2 * a * (1 - a) / n


class TestBhatiaDavis:
    def test_tenth(self):
        assert bhatia_davis(F(1, 10), 0, 1) == F(9, 100)

    def test_at_boundary(self):
        assert bhatia_davis(2, 2, 10) == 0

    def test_affine_case(self):
        # (10 - 2.8)(2.8 - 2) = 7.2 * 0.8
        assert bhatia_davis(F(14, 5), 2, 10) == F(72, 10) * F(8, 10) == F(144, 25)

    def test_domain(self):
        with pytest.raises(DomainError):
            bhatia_davis(11, 2, 10)


class TestEnvelope:
    def test_lower_end_attained(self):
        lo, hi = envelope(5, F(1, 10))
        assert (lo, hi) == (F(1, 25), F(9, 100))
        assert max_variance_unit(5, F(1, 10)) == lo

    def test_upper_end_attained(self):
        lo, hi = envelope(4, F(1, 2))
        assert (lo, hi) == (F(3, 16), F(1, 4))
        assert max_variance_unit(4, F(1, 2)) == hi

    def test_strictly_inside(self):
        lo, hi = envelope(3, F(1, 2))
        assert (lo, hi) == (F(1, 6), F(1, 4))
        assert lo <= F(1, 6) <= hi


class TestWitness:
    def test_example_dataset(self):
        structure, ds = witness_dataset(ProblemSpec.of(5, F(1, 10)))
        assert ds.values == (0, 0, 0, 0, F(1, 2))
        assert structure.count_at_max == 0
        assert structure.count_at_min == 4
        assert structure.interior == F(1, 2) and structure.has_interior

    def test_no_interior(self):
        structure, ds = witness_dataset(ProblemSpec.of(4, F(1, 2)))
        assert ds.values == (0, 0, 1, 1)
        assert not structure.has_interior

    def test_affine(self):
        _, ds = witness_dataset(ProblemSpec.of(5, F(14, 5), 2, 10))
        assert ds.values == (2, 2, 2, 2, 6)
        assert ds.mean == F(14, 5)
        assert ds.population_variance == F(64, 25)

    @pytest.mark.parametrize("c, value", [(F(0), 0), (F(1), 1)])
    def test_unit_endpoints(self, c, value):
        structure, ds = witness_dataset(ProblemSpec.of(3, c))
        assert ds.values == (value,) * 3
        assert not structure.has_interior

    def test_degenerate_bounds(self):
        _, ds = witness_dataset(ProblemSpec.of(3, 4, 4, 4))
        assert ds.values == (4, 4, 4)

    def test_structure_invariants(self):
        for n in range(1, 15):
            for p in range(0, 8):
                c = F(p, 7)
                s = extremal_structure(n, c)
                assert s.n == n
                assert s.count_at_max + s.interior == n * c
                assert s.has_interior == (s.interior > 0)


class TestSumSquares:
    def test_extremal_equality(self):
        lhs, rhs, holds = sum_squares_bound([0, 0, 0, 0, F(1, 2)])
        assert (lhs, rhs, holds) == (F(1, 4), F(1, 4), True)

    def test_all_ones(self):
        assert sum_squares_bound([1, 1, 1]) == (3, 3, True)

    def test_strict(self):
        # 1/4 + 49/100 versus 6/5 - (1/5)(4/5)
        lhs, rhs, holds = sum_squares_bound([F(1, 2), F(7, 10)])
        assert lhs == F(37, 50)
        assert rhs == F(26, 25)
        assert holds

    def test_domain(self):
        with pytest.raises(DomainError):
            sum_squares_bound([F(1, 2), F(3, 2)])


class TestCV:
    def test_tenth(self):
        assert cv_squared_max(F(1, 10)) == 9
        _, ds = witness_dataset(ProblemSpec.of(5, F(1, 10)))
        cv2 = ds.population_variance / ds.mean**2
        assert cv2 == 4
        assert cv2 <= 9

    def test_one(self):
        assert cv_squared_max(1) == 0

    def test_half(self):
        assert cv_squared_max(F(1, 2)) == 1
        # even n makes n/2 integer, so the sharp bound reaches c(1 - c)
        for n in (2, 4, 10):
            assert max_variance_unit(n, F(1, 2)) / F(1, 4) == 1

    @pytest.mark.parametrize("mean", [F(0), F(-1, 2), F(3, 2)])
    def test_domain(self, mean):
        with pytest.raises(DomainError):
            cv_squared_max(mean)


class TestDataset:
    def test_statistics(self):
        ds = Dataset([F(1), F(2), F(3), F(6)])
        assert ds.mean == 3
        assert ds.population_variance == F(7, 2)
        assert ds.sample_variance == F(14, 3)

    def test_float_statistics(self):
        ds = Dataset([0.0, 0.0, 0.0, 0.0, 0.5])
        assert ds.population_variance == pytest.approx(0.04, abs=1e-15)

    def test_sample_needs_two(self):
        with pytest.raises(DomainError):
            Dataset([F(1)]).sample_variance

    def test_empty(self):
        with pytest.raises(DomainError):
            Dataset([])


def test_bounds_order():
    with pytest.raises(DomainError):
        BoundsSpec(2, 1)


def test_problem_spec_n():
    with pytest.raises(DomainError):
        ProblemSpec.of(0, F(1, 2))
