from decimal import Decimal
from fractions import Fraction

import pytest

from maxvar.numbers import (
    DomainError,
    Interval,
    ParseError,
    RoundedValue,
    format_decimal,
    format_rational,
    frac_part,
    to_rational,
)


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("0.1", Fraction(1, 10)),
        (0.1, Fraction(1, 10)),
        ("1e-3", Fraction(1, 1000)),
        ("2.5E2", Fraction(250)),
        ("7/3", Fraction(7, 3)),
        (3, Fraction(3)),
        (Decimal("0.30"), Fraction(3, 10)),
        (" -4.25 ", Fraction(-17, 4)),
    ],
)
def test_to_rational(raw, expected):
    assert to_rational(raw) == expected


@pytest.mark.parametrize("raw", ["abc", "", "nan", "inf", "1/0", float("nan"), True, None])
def test_to_rational_rejects(raw):
    with pytest.raises(ParseError):
        to_rational(raw)


def test_float_frac_part_is_exact():
    # 0.1 in binary is slightly above 1/10, so n*0.1 drifts; the rational path does not
    for n in range(1, 200):
        assert frac_part(n * to_rational(0.1)) == Fraction(n % 10, 10)


@pytest.mark.parametrize(
    "r, expected",
    [(Fraction(1, 2), Fraction(1, 2)), (Fraction(3), Fraction(0)), (Fraction(7, 3), Fraction(1, 3)),
     (Fraction(-1, 3), Fraction(2, 3)), (5 * Fraction(1, 10), Fraction(1, 2))],
)
def test_frac_part(r, expected):
    assert frac_part(r) == expected


class TestRoundedValue:
    def test_inferred_decimals(self):
        rv = RoundedValue.parse("0.10")
        assert rv.decimals == 2
        assert rv.window == Interval(Fraction(19, 200), Fraction(21, 200))
        assert rv.window.width == Fraction(1, 100)

    def test_exact_collapses_window(self):
        rv = RoundedValue.parse("0.1", exact=True)
        assert rv.window == Interval.point(Fraction(1, 10))

    def test_decimals_override(self):
        assert RoundedValue.parse("0.1", decimals=3).window.width == Fraction(1, 1000)

    def test_integer_literal(self):
        rv = RoundedValue.parse("0")
        assert rv.decimals == 0
        assert rv.window == Interval(Fraction(-1, 2), Fraction(1, 2))

    def test_scientific(self):
        rv = RoundedValue.parse("1.5e-3")
        assert rv.value == Fraction(3, 2000)
        assert rv.decimals == 4

    def test_value_in_window(self):
        for lit in ["3.14159", "0", "12", "0.000"]:
            rv = RoundedValue.parse(lit)
            assert rv.value in rv.window

    def test_bad_literal(self):
        with pytest.raises(ParseError):
            RoundedValue.parse("x.y")

    def test_negative_decimals(self):
        with pytest.raises(DomainError):
            RoundedValue.parse("1", decimals=-1)


class TestInterval:
    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            Interval(1, 0)

    def test_intersect(self):
        a = Interval(0, 2)
        assert a.intersect(Interval(1, 3)) == Interval(1, 2)
        assert a.intersect(Interval(3, 4)) is None

    def test_clamp(self):
        assert Interval(0, 1).clamp(Fraction(3, 2)) == 1


@pytest.mark.parametrize(
    "r, text",
    [
        (Fraction(1, 25), "0.04"),
        (Fraction(1, 6), "0.166666666667"),
        (Fraction(64, 25), "2.56"),
        (Fraction(0), "0"),
        (Fraction(-7, 4), "-1.75"),
        (Fraction(441, 10000), "0.0441"),
    ],
)
def test_format_decimal(r, text):
    assert format_decimal(r) == text


def test_format_decimal_round_trip():
    for r in [Fraction(1, 3), Fraction(123456789, 7), Fraction(-2, 3 * 10**7), Fraction(10**9, 3),
              Fraction(1, 10**15)]:
        assert abs(to_rational(format_decimal(r)) - r) < Fraction(1, 10**12)


def test_format_rational():
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(1, 25)) == "1/25"
