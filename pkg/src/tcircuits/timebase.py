"""Exact time values in Q[sqrt2] and contiguous time intervals.

A :class:`Time` is ``a + b*sqrt2`` with rational ``a`` and ``b``.  Because 1
and sqrt2 are linearly independent over the rationals, equality is
componentwise and ordering is decided exactly by a sign test, so delays such
as 1 and sqrt2 can be mixed without any rounding.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import ROUND_HALF_EVEN, Decimal, localcontext
from fractions import Fraction
from numbers import Rational
from typing import Union

__all__ = [
    "Time",
    "Interval",
    "Unbounded",
    "INF",
    "NEG_INF",
    "ZERO",
    "ONE",
    "SQRT2",
    "parse_time",
    "compare",
    "to_decimal",
    "as_time",
]

_SQRT2_F = math.sqrt(2.0)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _sign_q(p: Fraction, q: Fraction) -> int:
    """Exact sign of ``p + q*sqrt2``."""
    if q == 0:
        return _sign(p)
    if p == 0:
        return _sign(q)
    sp, sq = _sign(p), _sign(q)
    if sp == sq:
        return sp
    # opposite signs: compare p^2 with 2 q^2
    return sp * _sign(p * p - 2 * q * q)


class Time:
    """An exact element ``rat + sqrt2 * sqrt2_part`` of Q[sqrt2]."""

    __slots__ = ("rat", "irr", "_approx", "_mag", "_hash")

    def __init__(self, rat=0, irr=0):
        rat = rat if isinstance(rat, Fraction) else Fraction(rat)
        irr = irr if isinstance(irr, Fraction) else Fraction(irr)
        self.rat = rat
        self.irr = irr
        try:
            fr = rat.numerator / rat.denominator
            fi = irr.numerator / irr.denominator
            self._approx = fr + fi * _SQRT2_F
            self._mag = abs(fr) + 1.5 * abs(fi) + 1.0
        except OverflowError:
            self._approx = None
            self._mag = None
        self._hash = None

    # -- construction -------------------------------------------------
    @classmethod
    def parse(cls, text: str) -> "Time":
        return parse_time(text)

    @property
    def sqrt2_part(self) -> Fraction:
        return self.irr

    @property
    def rat_part(self) -> Fraction:
        return self.rat

    def is_rational(self) -> bool:
        return self.irr == 0

    # -- ordering ------------------------------------------------------
    def _cmp(self, other: "Time") -> int:
        a, b = self._approx, other._approx
        if a is not None and b is not None:
            # float filter; margin far above accumulated rounding error
            margin = 1e-12 * (self._mag + other._mag)
            if a - b > margin:
                return 1
            if b - a > margin:
                return -1
        return _sign_q(self.rat - other.rat, self.irr - other.irr)

    def __eq__(self, other):
        if isinstance(other, Time):
            return self.rat == other.rat and self.irr == other.irr
        if isinstance(other, (int, Rational)):
            return self.irr == 0 and self.rat == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rat, self.irr)) if self.irr else hash(self.rat)
        return self._hash

    def _order(self, other):
        """Sign of ``self - other``, or None when ``other`` is not comparable."""
        if type(other) is Time:
            a, b = self._approx, other._approx
            if a is not None and b is not None:
                margin = 1e-12 * (self._mag + other._mag)
                if a - b > margin:
                    return 1
                if b - a > margin:
                    return -1
            return _sign_q(self.rat - other.rat, self.irr - other.irr)
        other = _coerce(other)
        if other is NotImplemented:
            return None
        if isinstance(other, Unbounded):
            return -other.sign
        return self._cmp(other)

    def __lt__(self, other):
        c = self._order(other)
        return NotImplemented if c is None else c < 0

    def __le__(self, other):
        c = self._order(other)
        return NotImplemented if c is None else c <= 0

    def __gt__(self, other):
        c = self._order(other)
        return NotImplemented if c is None else c > 0

    def __ge__(self, other):
        c = self._order(other)
        return NotImplemented if c is None else c >= 0

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        if type(other) is Time:
            return Time(self.rat + other.rat, self.irr + other.irr)
        other = _coerce(other)
        if not isinstance(other, Time):
            return NotImplemented
        return Time(self.rat + other.rat, self.irr + other.irr)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is Time:
            return Time(self.rat - other.rat, self.irr - other.irr)
        other = _coerce(other)
        if not isinstance(other, Time):
            return NotImplemented
        return Time(self.rat - other.rat, self.irr - other.irr)

    def __rsub__(self, other):
        other = _coerce(other)
        if not isinstance(other, Time):
            return NotImplemented
        return other - self

    def __neg__(self):
        return Time(-self.rat, -self.irr)

    def __pos__(self):
        return self

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __mul__(self, other):
        if isinstance(other, (int, Rational)):
            f = Fraction(other)
            return Time(self.rat * f, self.irr * f)
        if isinstance(other, Time):
            return Time(
                self.rat * other.rat + 2 * self.irr * other.irr,
                self.rat * other.irr + self.irr * other.rat,
            )
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            f = Fraction(other)
            if f == 0:
                raise ZeroDivisionError("division of Time by zero")
            return Time(self.rat / f, self.irr / f)
        if isinstance(other, Time):
            norm = other.rat * other.rat - 2 * other.irr * other.irr
            if norm == 0:
                raise ZeroDivisionError("division of Time by zero")
            conj = Time(other.rat, -other.irr)
            num = self * conj
            return Time(num.rat / norm, num.irr / norm)
        return NotImplemented

    def sign(self) -> int:
        return _sign_q(self.rat, self.irr)

    def floor(self) -> int:
        """Largest integer ``n`` with ``n <= self`` (exact)."""
        if self._approx is not None:
            n = math.floor(self._approx)
        else:
            n = math.floor(self.rat + self.irr * Fraction(_SQRT2_F))
        while Time(n) > self:
            n -= 1
        while Time(n + 1) <= self:
            n += 1
        return n

    def mod(self, period: "Time") -> "Time":
        """``self - k*period`` reduced into ``[0, period)``."""
        period = _coerce(period)
        if period <= ZERO:
            raise ValueError("period must be positive")
        k = (self / period).floor()
        r = self - period * k
        return r

    def __float__(self):
        if self._approx is not None:
            return self._approx
        return float(Decimal(to_decimal(self, 30)))

    # -- text ----------------------------------------------------------
    def __repr__(self):
        return f"Time({self})"

    def __str__(self):
        return format_time(self)


@dataclass(frozen=True)
class Unbounded:
    """An infinite interval endpoint; ``sign`` is +1 or -1."""

    sign: int

    def __lt__(self, other):
        other = _coerce(other)
        if isinstance(other, Unbounded):
            return self.sign < other.sign
        return self.sign < 0

    def __le__(self, other):
        other = _coerce(other)
        if isinstance(other, Unbounded):
            return self.sign <= other.sign
        return self.sign < 0

    def __gt__(self, other):
        other = _coerce(other)
        if isinstance(other, Unbounded):
            return self.sign > other.sign
        return self.sign > 0

    def __ge__(self, other):
        other = _coerce(other)
        if isinstance(other, Unbounded):
            return self.sign >= other.sign
        return self.sign > 0

    def __neg__(self):
        return Unbounded(-self.sign)

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        return self

    def __str__(self):
        return "inf" if self.sign > 0 else "-inf"

    def __repr__(self):
        return "INF" if self.sign > 0 else "NEG_INF"


INF = Unbounded(1)
NEG_INF = Unbounded(-1)
ZERO = Time(0)
ONE = Time(1)
SQRT2 = Time(0, 1)

Bound = Union[Time, Unbounded]


def _coerce(x):
    if isinstance(x, (Time, Unbounded)):
        return x
    if isinstance(x, bool):
        return NotImplemented
    if isinstance(x, (int, Rational)):
        return Time(x)
    return NotImplemented


def as_time(x) -> Time:
    """Convert ints, Fractions and exact strings to :class:`Time`."""
    if isinstance(x, Time):
        return x
    if isinstance(x, str):
        return parse_time(x)
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or string")
    c = _coerce(x)
    if c is NotImplemented or isinstance(c, Unbounded):
        raise TypeError(f"cannot convert {x!r} to Time")
    return c


def compare(t1: Time, t2: Time) -> int:
    """-1, 0 or 1 according to the exact sign of ``t1 - t2``."""
    t1, t2 = as_time(t1), as_time(t2)
    return _sign_q(t1.rat - t2.rat, t1.irr - t2.irr)


# -- text forms ---------------------------------------------------------

def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_time(t: Time) -> str:
    """Compact exact form such as ``3/2``, ``sqrt2``, ``1-1/2*sqrt2``."""
    a, b = t.rat, t.irr
    if b == 0:
        return _frac_str(a)
    if b == 1:
        irr = "sqrt2"
    elif b == -1:
        irr = "-sqrt2"
    else:
        irr = f"{_frac_str(b)}*sqrt2"
    if a == 0:
        return irr
    if irr.startswith("-"):
        return f"{_frac_str(a)}{irr}"
    return f"{_frac_str(a)}+{irr}"


_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:/\d+)?"
_TERM = re.compile(
    rf"""\s*(?P<sign>[+-])?\s*
        (?:
            (?P<coef>{_NUM})\s*\*\s*sqrt2
          | (?P<bare>sqrt2)
          | (?P<num>{_NUM})
        )\s*""",
    re.VERBOSE,
)


def parse_time(text: str) -> Time:
    """Parse ``a/b + c/e * sqrt2``; spaces optional, either term omittable."""
    s = text.strip()
    if not s:
        raise ValueError("empty time literal")
    pos = 0
    rat = Fraction(0)
    irr = Fraction(0)
    first = True
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad time literal {text!r} at position {pos}")
        if not first and m.group("sign") is None:
            raise ValueError(f"missing operator in time literal {text!r}")
        sign = -1 if m.group("sign") == "-" else 1
        try:
            if m.group("coef") is not None:
                irr += sign * Fraction(m.group("coef"))
            elif m.group("bare") is not None:
                irr += sign
            else:
                rat += sign * Fraction(m.group("num"))
        except ZeroDivisionError:
            raise ValueError(f"zero denominator in time literal {text!r}") from None
        pos = m.end()
        first = False
    return Time(rat, irr)


def to_decimal(t: Time, digits: int) -> str:
    """Correctly rounded decimal with ``digits`` places after the point.

    Ties (only possible for rational values) round half to even.
    """
    if digits < 1:
        raise ValueError("digits must be >= 1")
    t = as_time(t)
    scale = 10 ** digits
    x = t * scale
    n = x.floor()
    rest = x - Time(n)
    c = compare(rest, Time(Fraction(1, 2)))
    if c > 0 or (c == 0 and n % 2 == 1):
        n += 1
    neg = n < 0
    n = abs(n)
    whole, frac = divmod(n, scale)
    return f"{'-' if neg else ''}{whole}.{frac:0{digits}d}"


def time_to_decimal_obj(t: Time, digits: int = 12) -> Decimal:
    return Decimal(to_decimal(t, digits))


# -- intervals ----------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    """A contiguous time interval; endpoints may be unbounded."""

    lo: Bound
    hi: Bound
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        lo = self.lo if isinstance(self.lo, Unbounded) else as_time(self.lo)
        hi = self.hi if isinstance(self.hi, Unbounded) else as_time(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if isinstance(lo, Unbounded):
            object.__setattr__(self, "lo_closed", False)
            if lo.sign > 0:
                raise ValueError("lower bound cannot be +inf")
        if isinstance(hi, Unbounded):
            object.__setattr__(self, "hi_closed", False)
            if hi.sign < 0:
                raise ValueError("upper bound cannot be -inf")
        if hi < lo:
            raise ValueError(f"empty interval: lo={lo} > hi={hi}")
        if not (isinstance(lo, Unbounded) or isinstance(hi, Unbounded)) and lo == hi:
            if not (self.lo_closed and self.hi_closed):
                raise ValueError("degenerate interval must be closed")

    @classmethod
    def closed(cls, lo, hi) -> "Interval":
        return cls(lo, hi)

    @classmethod
    def parse(cls, text: str) -> "Interval":
        """Parse ``lo..hi`` (each side an exact time, ``-inf`` or ``inf``)."""
        if ".." not in text:
            raise ValueError(f"interval must look like 'lo..hi', got {text!r}")
        lo_s, hi_s = text.split("..", 1)
        return cls(_parse_bound(lo_s), _parse_bound(hi_s))

    @property
    def bounded(self) -> bool:
        return isinstance(self.lo, Time) and isinstance(self.hi, Time)

    @property
    def length(self):
        if not self.bounded:
            return INF
        return self.hi - self.lo

    def __contains__(self, t) -> bool:
        t = as_time(t)
        if self.lo_closed:
            if t < self.lo:
                return False
        elif t <= self.lo:
            return False
        if self.hi_closed:
            return t <= self.hi
        return t < self.hi

    def contains_interval(self, other: "Interval") -> bool:
        if other.lo < self.lo or other.hi > self.hi:
            return False
        if other.lo == self.lo and other.lo_closed and not self.lo_closed:
            return False
        if other.hi == self.hi and other.hi_closed and not self.hi_closed:
            return False
        return True

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, loc = (self.lo, self.lo_closed) if self.lo > other.lo else (other.lo, other.lo_closed)
        if self.lo == other.lo:
            loc = self.lo_closed and other.lo_closed
        hi, hic = (self.hi, self.hi_closed) if self.hi < other.hi else (other.hi, other.hi_closed)
        if self.hi == other.hi:
            hic = self.hi_closed and other.hi_closed
        if hi < lo or (hi == lo and not (loc and hic)):
            return None
        return Interval(lo, hi, loc, hic)

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {self.hi}{right}"

    def text(self) -> str:
        return f"{self.lo}..{self.hi}"


def _parse_bound(s: str) -> Bound:
    s = s.strip()
    if s in ("inf", "+inf"):
        return INF
    if s == "-inf":
        return NEG_INF
    return parse_time(s)


def parse_bound(s: str) -> Bound:
    return _parse_bound(s)
