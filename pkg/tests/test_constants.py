"""Interval comparisons against the e-based mechanism constants."""

from fractions import Fraction

import pytest

from budgetmech.constants import (
    DET_SM_RATIO,
    E,
    E_OVER_E_MINUS_1,
    ONE_MINUS_INV_E,
    RANDOM_SM_RATIO,
    X_MECH_SM,
    compare_const,
    const_times_at_least,
    is_below,
)


def test_e_enclosure():
    lo, hi = E.bounds(30)
    assert lo < hi
    assert Fraction(27182, 10000) < lo and hi < Fraction(27183, 10000)


@pytest.mark.parametrize(
    "const,below,above",
    [
        # decimal brackets from the closed forms
        (X_MECH_SM, Fraction(734, 100), Fraction(735, 100)),
        (DET_SM_RATIO, Fraction(834, 100), Fraction(835, 100)),
        (RANDOM_SM_RATIO, Fraction(790, 100), Fraction(791, 100)),
        (E_OVER_E_MINUS_1, Fraction(158, 100), Fraction(159, 100)),
        (ONE_MINUS_INV_E, Fraction(63, 100), Fraction(64, 100)),
    ],
)
def test_constant_brackets(const, below, above):
    assert compare_const(below, const) == -1
    assert compare_const(above, const) == 1


def test_x_matches_its_defining_equation():
    """x = (1 + 4e + sqrt(1 + 24e^2)) / (2(e-1)), so 2x(e-1) - 4e - 1 squares to 1 + 24e^2."""
    digits = 60
    el, eh = E.bounds(digits)
    xl, xh = X_MECH_SM.bounds(digits)
    lhs_lo = 2 * xl * (el - 1) - 4 * eh - 1
    lhs_hi = 2 * xh * (eh - 1) - 4 * el - 1
    assert lhs_lo * lhs_lo <= 1 + 24 * eh * eh
    assert lhs_hi * lhs_hi >= 1 + 24 * el * el


def test_narrowing_comparison():
    # a value inside the 30-digit bracket forces a precision increase
    lo, hi = X_MECH_SM.bounds(30)
    mid = (lo + hi) / 2
    assert compare_const(mid, X_MECH_SM) in (-1, 1)


def test_is_below():
    assert is_below(Fraction(7), X_MECH_SM)
    assert not is_below(Fraction(8), X_MECH_SM)


def test_const_times_at_least():
    # x * 1 >= 7 but not >= 8
    assert const_times_at_least(X_MECH_SM, Fraction(1), Fraction(7))
    assert not const_times_at_least(X_MECH_SM, Fraction(1), Fraction(8))
    # zero scale: decided by the sign of the right-hand side
    assert const_times_at_least(X_MECH_SM, Fraction(0), Fraction(0))
    assert not const_times_at_least(X_MECH_SM, Fraction(0), Fraction(1))
