"""Exact numbers: arbitrary-precision rationals plus the quadratic field Q(sqrt2).

Every quantity a mechanism touches (costs, bids, values, budgets, payments)
is exact. Rationals are plain ``fractions.Fraction``. The lower-bound
instance families carry sqrt2 inside item values, so we extend the tower
with :class:`Quad`, numbers of the form a + b*sqrt2 with rational a, b.
Q(sqrt2) is a field and its sign test is decidable in rational arithmetic,
which keeps stopping-rule comparisons (where <= vs < matters) exact even on
those instances.

Arithmetic normalises: any operation whose result has b == 0 returns a plain
Fraction, so Quad instances always genuinely carry a sqrt2 part.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Union


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _make(a: Fraction, b: Fraction) -> "Num":
    return a if b == 0 else Quad(a, b)


@dataclass(frozen=True)
class Quad:
    """a + b*sqrt2 with a, b rational and b != 0 after normalisation."""

    a: Fraction
    b: Fraction

    def _coerce(self, other) -> "Quad | None":
        if isinstance(other, Quad):
            return other
        if isinstance(other, (int, Fraction)):
            return Quad(Fraction(other), Fraction(0))
        return None

    def sign(self) -> int:
        sa, sb = _sign(self.a), _sign(self.b)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb if sa == 0 else sa
        # opposite signs: |a| vs |b|*sqrt2 decided by squaring
        t = self.a * self.a - 2 * self.b * self.b
        return sa * _sign(t)

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _make(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Quad(-self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _make(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _make(o.a - self.a, o.b - self.b)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return _make(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        norm = o.a * o.a - 2 * o.b * o.b  # zero only for o == 0
        if norm == 0:
            raise ZeroDivisionError("division by zero")
        inv_a, inv_b = o.a / norm, -o.b / norm
        return _make(self.a * inv_a + 2 * self.b * inv_b, self.a * inv_b + self.b * inv_a)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Quad.__truediv__(o, self)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def _cmp(self, other) -> "int | None":
        o = self._coerce(other)
        if o is None:
            return None
        return (self - o).sign() if isinstance(self - o, Quad) else _sign(self - o)

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is None else c >= 0

    def __eq__(self, other):
        if isinstance(other, Quad):
            return self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction)):
            return False  # normalised Quad always has b != 0
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, "sqrt2"))

    def __float__(self):
        return float(self.a) + float(self.b) * 2 ** 0.5

    def __repr__(self):
        return f"Quad({self.a!r}, {self.b!r})"

    def __str__(self):
        return format_num(self)


Num = Union[Fraction, Quad]

SQRT2 = Quad(Fraction(0), Fraction(1))
ONE_PLUS_SQRT2 = Quad(Fraction(1), Fraction(1))
TWO_PLUS_SQRT2 = Quad(Fraction(2), Fraction(1))


def as_num(x) -> Num:
    """Coerce ints, Fractions, Quads, or literal strings to an exact Num."""
    if isinstance(x, (Fraction, Quad)):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_num(x)
    raise TypeError(f"cannot make an exact number from {type(x).__name__}")


def parse_num(text: str) -> Num:
    """Parse an exact numeric literal.

    Accepts integers, "p/q", decimal strings (converted exactly, 0.7 -> 7/10)
    and sqrt2 terms: "sqrt2", "3*sqrt2", "1+sqrt2", "2-1/2*sqrt2".
    """
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty numeric literal")
    terms: list[tuple[int, str]] = []
    sign, start = 1, 0
    if s[0] in "+-":
        sign, start = (1 if s[0] == "+" else -1), 1
    cur = []
    for ch in s[start:]:
        if ch in "+-" and not (cur and cur[-1] in "eE"):
            terms.append((sign, "".join(cur)))
            sign, cur = (1 if ch == "+" else -1), []
        else:
            cur.append(ch)
    terms.append((sign, "".join(cur)))

    a, b = Fraction(0), Fraction(0)
    for sgn, term in terms:
        if not term:
            raise ValueError(f"malformed numeric literal {text!r}")
        try:
            if term == "sqrt2":
                b += sgn
            elif term.endswith("*sqrt2"):
                b += sgn * Fraction(term[: -len("*sqrt2")])
            else:
                a += sgn * Fraction(term)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed numeric literal {text!r}") from exc
    return _make(a, b)


def format_num(x: Num) -> str:
    """Render a Num so parse_num(format_num(x)) == x."""
    x = as_num(x)
    if isinstance(x, Fraction):
        return str(x)
    parts = []
    if x.a != 0:
        parts.append(str(x.a))
    coef = {1: "sqrt2", -1: "-sqrt2"}.get(x.b, f"{x.b}*sqrt2")
    if parts and not coef.startswith("-"):
        parts.append("+" + coef)
    else:
        parts.append(coef)
    return "".join(parts)


def sqrt_bounds(x: "Fraction | int", digits: int) -> tuple[Fraction, Fraction]:
    """Rational lo <= sqrt(x) <= hi with hi - lo <= 2/10^digits."""
    x = Fraction(x)
    if x < 0:
        raise ValueError("sqrt of a negative number")
    scale = 10 ** digits
    n = (x.numerator * scale * scale) // x.denominator
    r = isqrt(n)
    return Fraction(r, scale), Fraction(r + 1, scale)


def num_bounds(x: Num, digits: int) -> tuple[Fraction, Fraction]:
    """Rational enclosure of x (exact for Fractions)."""
    if isinstance(x, Quad):
        lo, hi = sqrt_bounds(2, digits)
        if x.b >= 0:
            return x.a + x.b * lo, x.a + x.b * hi
        return x.a + x.b * hi, x.a + x.b * lo
    return x, x


def floor_scaled(x: Num, scale: int) -> int:
    """Exact floor(x * scale). Terminates because sqrt2 is irrational."""
    if isinstance(x, Fraction) or isinstance(x, int):
        x = Fraction(x)
        return (x.numerator * scale) // x.denominator
    digits = 40
    while True:
        lo, hi = num_bounds(x, digits)
        flo = (lo.numerator * scale) // lo.denominator
        fhi = (hi.numerator * scale) // hi.denominator
        if flo == fhi:
            return flo
        digits *= 2


def decimal_str(x: Num, digits: int = 30) -> str:
    """Decimal rendering truncated toward zero at `digits` places.

    Trailing zeros are stripped ("5/2" -> "2.5", "3" -> "3"), which keeps
    report files stable and human-readable.
    """
    x = as_num(x)
    neg = (x.sign() < 0) if isinstance(x, Quad) else (x < 0)
    mag = -x if neg else x
    scale = 10 ** digits
    scaled = floor_scaled(mag, scale)
    whole, frac = divmod(scaled, scale)
    out = str(whole)
    if frac:
        out += "." + str(frac).zfill(digits).rstrip("0")
    return "-" + out if neg and (whole or frac) else out
