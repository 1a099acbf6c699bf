from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import decimal_oracle, mp_of, sign_oracle
from strategies import small_fracs, small_irr, times
from tcircuits import INF, NEG_INF, SQRT2, Interval, Time, parse_time
from tcircuits.timebase import compare, format_time, to_decimal


@pytest.mark.parametrize("a, b, want", [
    ((0, 0), (0, 0), 0),
    ((1, 0), (0, 1), -1),
    ((3, 0), (0, 2), 1),
])
def test_compare_examples(a, b, want):
    assert compare(Time(*a), Time(*b)) == want


def test_arith_examples():
    assert Time(1) + Time(0, 1) == Time(1, 1)
    assert Time(1, 1) - Time(1, 1) == Time(0, 0)
    assert Time(Fraction(1, 2), Fraction(1, 3)) * 3 == Time(Fraction(3, 2), 1)


@pytest.mark.parametrize("t, digits, want", [
    (Time(0, 1), 5, "1.41421"),
    (Time(2, 0), 3, "2.000"),
    (Time(1, 1), 3, "2.414"),
])
def test_to_decimal_examples(t, digits, want):
    assert to_decimal(t, digits) == want


@given(small_fracs, small_irr, small_fracs, small_irr)
def test_order_matches_high_precision(a, b, c, e):
    assert compare(Time(a, b), Time(c, e)) == sign_oracle(a - c, b - e)


@given(small_fracs, small_irr, st.integers(1, 15))
def test_decimal_matches_high_precision(a, b, digits):
    if b == 0 and (a * 10 ** digits).denominator == 2:
        return  # exact ties are rounded half-even, not by the oracle
    assert to_decimal(Time(a, b), digits) == decimal_oracle(a, b, digits)


@given(times, times, times)
def test_field_laws(x, y, z):
    assert x + y == y + x
    assert (x + y) + z == x + (y + z)
    assert x - x == Time(0)
    assert -(-x) == x
    assert x * 2 == x + x


@given(times, times)
def test_order_is_total_and_consistent(x, y):
    assert (x < y) + (x == y) + (x > y) == 1
    assert (x <= y) == (not x > y)
    if x < y:
        assert mp_of(x) < mp_of(y)


@given(times)
def test_parse_format_roundtrip(t):
    assert parse_time(format_time(t)) == t
    assert parse_time(str(t)) == t


@given(times)
def test_hash_agrees_with_equality(t):
    u = Time(t.rat, t.irr)
    assert t == u and hash(t) == hash(u)


def test_canonical_rationals():
    t = Time(Fraction(4, -6), Fraction(2, 4))
    assert t.rat == Fraction(-2, 3) and t.rat.denominator == 3
    assert t.irr == Fraction(1, 2)


@pytest.mark.parametrize("text, want", [
    ("3/2", Time(Fraction(3, 2))),
    ("sqrt2", SQRT2),
    ("1 + sqrt2", Time(1, 1)),
    ("2*sqrt2 - 1/2", Time(Fraction(-1, 2), 2)),
    ("-sqrt2", Time(0, -1)),
    ("0.25", Time(Fraction(1, 4))),
])
def test_parse_literals(text, want):
    assert parse_time(text) == want


@pytest.mark.parametrize("bad", ["", "abc", "1 2", "sqrt3", "1/0", "1/2x"])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        parse_time(bad)


def test_floats_rejected():
    with pytest.raises(TypeError):
        Time(0) + 0.5


def test_floor_and_mod_exact():
    assert (SQRT2 * 10).floor() == 14
    assert (-SQRT2).floor() == -2
    assert Time(7, 0).mod(Time(5, 0) / 2) == Time(2)
    r = (SQRT2 * 3).mod(Time(1))
    assert Time(0) <= r < Time(1) and r == SQRT2 * 3 - 4


def test_interval_invariants():
    with pytest.raises(ValueError):
        Interval(Time(2), Time(1))
    with pytest.raises(ValueError):
        Interval(Time(1), Time(1), lo_closed=False)
    assert Interval(Time(1), Time(1)).length == Time(0)
    line = Interval(NEG_INF, INF)
    assert Time(10 ** 9) in line and not line.bounded
    assert Interval.parse("0..sqrt2").hi == SQRT2
    I = Interval(Time(0), Time(4))
    J = Interval(Time(1), Time(6))
    assert I.intersect(J) == Interval(Time(1), Time(4))
    assert I.intersect(Interval(Time(5), Time(6))) is None
    assert I.contains_interval(Interval(Time(1), Time(2)))
    assert not I.contains_interval(J)
