"""Quad arithmetic, literal parsing, and decimal rendering."""

from fractions import Fraction

import pytest

from budgetmech.exact import (
    ONE_PLUS_SQRT2,
    SQRT2,
    TWO_PLUS_SQRT2,
    Quad,
    as_num,
    decimal_str,
    floor_scaled,
    format_num,
    num_bounds,
    parse_num,
    sqrt_bounds,
)


def test_sqrt2_squares_to_two():
    assert SQRT2 * SQRT2 == Fraction(2)


def test_operations_normalise_to_fraction():
    # (1+sqrt2) + (1-sqrt2) has no sqrt2 part left
    assert ONE_PLUS_SQRT2 + Quad(Fraction(1), Fraction(-1)) == Fraction(2)
    assert (SQRT2 * 3) / SQRT2 == Fraction(3)


def test_field_inverse():
    x = Quad(Fraction(3), Fraction(-2))
    assert x * (1 / x) == Fraction(1)
    with pytest.raises(ZeroDivisionError):
        ONE_PLUS_SQRT2 / 0


def test_sign_with_opposite_components():
    # 3 - 2*sqrt2 > 0 and 1 - sqrt2 < 0, both need the squaring trick
    assert Quad(Fraction(3), Fraction(-2)).sign() == 1
    assert Quad(Fraction(1), Fraction(-1)).sign() == -1
    assert Quad(Fraction(-3), Fraction(2)).sign() == -1


def test_ordering_against_rationals():
    assert SQRT2 > Fraction(7, 5)
    assert SQRT2 < Fraction(3, 2)
    assert ONE_PLUS_SQRT2 <= TWO_PLUS_SQRT2
    assert not SQRT2 == Fraction(7, 5)


def test_quad_never_equals_rational():
    """A normalised Quad always has b != 0, so it is irrational."""
    assert (SQRT2 == Fraction(1)) is False
    assert SQRT2 != 1


@pytest.mark.parametrize(
    "text,expected",
    [
        ("7/10", Fraction(7, 10)),
        ("0.7", Fraction(7, 10)),
        ("-3", Fraction(-3)),
        ("sqrt2", SQRT2),
        ("1+sqrt2", ONE_PLUS_SQRT2),
        ("2-1/2*sqrt2", Quad(Fraction(2), Fraction(-1, 2))),
        ("3*sqrt2", Quad(Fraction(0), Fraction(3))),
        ("-sqrt2+sqrt2", Fraction(0)),
    ],
)
def test_parse_num(text, expected):
    assert parse_num(text) == expected


@pytest.mark.parametrize("bad", ["", "1//2", "sqrt3", "2**3", "1+"])
def test_parse_num_rejects(bad):
    with pytest.raises(ValueError):
        parse_num(bad)


@pytest.mark.parametrize(
    "value",
    [Fraction(5, 2), Fraction(-7, 10), SQRT2, ONE_PLUS_SQRT2,
     Quad(Fraction(-2), Fraction(1, 3)), Fraction(0)],
)
def test_format_round_trip(value):
    assert parse_num(format_num(value)) == value


def test_as_num_rejects_floats():
    with pytest.raises(TypeError):
        as_num(0.7)


def test_sqrt_bounds_enclose():
    lo, hi = sqrt_bounds(2, 20)
    assert lo * lo <= 2 <= hi * hi
    assert hi - lo <= Fraction(2, 10 ** 20)


def test_num_bounds_exact_for_fraction():
    assert num_bounds(Fraction(5, 3), 10) == (Fraction(5, 3), Fraction(5, 3))


def test_floor_scaled_irrational():
    # sqrt2 = 1.41421356...
    assert floor_scaled(SQRT2, 10 ** 8) == 141421356
    assert floor_scaled(Fraction(5, 2), 100) == 250


@pytest.mark.parametrize(
    "value,digits,expected",
    [
        (Fraction(5, 2), 30, "2.5"),
        (Fraction(3), 30, "3"),
        (Fraction(1, 3), 5, "0.33333"),
        (Fraction(-5, 4), 30, "-1.25"),
        (ONE_PLUS_SQRT2, 10, "2.4142135623"),
    ],
)
def test_decimal_str(value, digits, expected):
    assert decimal_str(value, digits) == expected
