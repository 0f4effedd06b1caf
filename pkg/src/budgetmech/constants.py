"""Irrational mechanism constants as nested rational intervals.

The deterministic submodular mechanism compares x*v(i*) against an exact
optimum, where x = (1 + 4e + sqrt(1 + 24e^2)) / (2(e-1)), and several
approximation bounds involve e. These are irrational, so comparisons against
exact rationals run on shrinking rational enclosures: start at 30 digits and
double the precision until the comparison is decided. The quantities we
compare are rational (or live in Q(sqrt2)) while the constants are built from
e, so equality never occurs and the loop terminates.

sqrt2-based constants do not live here; those comparisons are exact via
:class:`budgetmech.exact.Quad`.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .exact import Num, num_bounds, sqrt_bounds

START_DIGITS = 30
_MAX_DIGITS = 30 * 2 ** 12


def _e_bounds(digits: int) -> tuple[Fraction, Fraction]:
    # e = sum 1/k!; after m terms the tail is below 1/(m! * m)
    m, fact = 1, 1
    while fact * m < 10 ** (digits + 1):
        m += 1
        fact *= m
    total, term = Fraction(0), Fraction(1)
    for k in range(1, m + 1):
        total += term
        term /= k
    total += term
    return total, total + Fraction(1, fact * m)


class IrrationalConstant:
    """A positive irrational with on-demand rational enclosures."""

    def __init__(self, name: str, bounds_fn: Callable[[int], tuple[Fraction, Fraction]]):
        self.name = name
        self._fn = bounds_fn
        self._cache: dict[int, tuple[Fraction, Fraction]] = {}

    def bounds(self, digits: int) -> tuple[Fraction, Fraction]:
        if digits not in self._cache:
            self._cache[digits] = self._fn(digits)
        return self._cache[digits]

    def __repr__(self):
        lo, _ = self.bounds(START_DIGITS)
        return f"<{self.name} ~ {float(lo):.6f}>"


E = IrrationalConstant("e", _e_bounds)


def _x_mech_sm_bounds(digits: int) -> tuple[Fraction, Fraction]:
    el, eh = E.bounds(digits + 8)
    sl = sqrt_bounds(1 + 24 * el * el, digits + 8)[0]
    sh = sqrt_bounds(1 + 24 * eh * eh, digits + 8)[1]
    num_lo, num_hi = 1 + 4 * el + sl, 1 + 4 * eh + sh
    den_lo, den_hi = 2 * (el - 1), 2 * (eh - 1)
    return num_lo / den_hi, num_hi / den_lo


# Threshold multiplier of the deterministic submodular mechanism, ~7.3409.
X_MECH_SM = IrrationalConstant("x", _x_mech_sm_bounds)

# Its approximation bound 1 + x, ~8.3409 (the "8.34" figure).
DET_SM_RATIO = IrrationalConstant(
    "1+x", lambda d: tuple(v + 1 for v in X_MECH_SM.bounds(d))
)


def _random_sm_ratio_bounds(digits: int) -> tuple[Fraction, Fraction]:
    el, eh = E.bounds(digits + 8)
    return 5 * el / (eh - 1), 5 * eh / (el - 1)


# 5e/(e-1), ~7.9099: the randomized submodular mechanism's bound.
RANDOM_SM_RATIO = IrrationalConstant("5e/(e-1)", _random_sm_ratio_bounds)


def _e_frac_bounds(digits: int) -> tuple[Fraction, Fraction]:
    el, eh = E.bounds(digits + 8)
    return eh / (eh - 1), el / (el - 1)  # e/(e-1) decreases in e


E_OVER_E_MINUS_1 = IrrationalConstant("e/(e-1)", _e_frac_bounds)


def _one_minus_inv_e_bounds(digits: int) -> tuple[Fraction, Fraction]:
    el, eh = E.bounds(digits + 8)
    return 1 - 1 / el, 1 - 1 / eh


ONE_MINUS_INV_E = IrrationalConstant("1-1/e", _one_minus_inv_e_bounds)


def compare_const(value: Num, const: IrrationalConstant) -> int:
    """-1 if value < const, +1 if value > const; widens precision as needed."""
    digits = START_DIGITS
    while digits <= _MAX_DIGITS:
        clo, chi = const.bounds(digits)
        vlo, vhi = num_bounds(value, digits)
        if vhi < clo:
            return -1
        if vlo > chi:
            return 1
        digits *= 2
    raise ArithmeticError(
        f"comparison against {const.name} undecided at {_MAX_DIGITS} digits; "
        "the value appears to coincide with the irrational constant"
    )


def is_below(value: Num, const: IrrationalConstant) -> bool:
    return compare_const(value, const) < 0


def const_times_at_least(const: IrrationalConstant, scale: Num, rhs: Num) -> bool:
    """Decide const*scale >= rhs for scale >= 0 (exact, widening precision)."""
    if scale == 0:
        return rhs <= 0
    return compare_const(rhs / scale, const) < 0
