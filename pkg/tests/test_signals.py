from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import signals, subintervals
from tcircuits import INF, NEG_INF, Execution, Interval, Signal, Time, limit_of_covering
from tcircuits.signals import (CoveringError, SignalDomainError, constant, equal_on, first_difference,
                               from_high_intervals, pointwise, restrict)
from tcircuits.traceio import format_signal, parse_signals

I04 = Interval(Time(0), Time(4))


def T(x):
    return Time(Fraction(x))


def test_value_at_examples():
    s = Signal(Interval(Time(0), Time(5)), 0, (Time(1), Time(2)))
    assert s.value_at(T("3/2")) == 1
    assert s.value_at(Time(1)) == 1
    assert s.value_at(Time(5)) == 0


def test_value_at_outside_domain():
    s = constant(0, I04)
    with pytest.raises(SignalDomainError):
        s.value_at(Time(5))


def test_restrict_examples():
    line = constant(0, Interval(NEG_INF, INF))
    assert restrict(line, Interval(Time(0), Time(1))) == constant(0, Interval(Time(0), Time(1)))
    s = Signal(I04, 0, (Time(1), Time(2), Time(3)))
    r = restrict(s, Interval(T("3/2"), Time(4)))
    assert r.init == 1 and r.transitions == (Time(2), Time(3))
    assert restrict(s, s.domain) == s


def test_restrict_outside_domain_rejected():
    with pytest.raises(SignalDomainError):
        restrict(constant(0, I04), Interval(Time(3), Time(5)))


def test_equal_on_examples():
    s = Signal(I04, 0, (Time(1),))
    assert equal_on(s, s, Interval(Time(0), Time(1)))
    assert not equal_on(constant(0, I04), constant(1, I04), Interval(Time(0), Time(1)))
    # a pulse open at 2 has the same right-continuous representative as one closed at 2
    a = from_high_intervals(I04, [(2, 3)])
    b = Signal(I04, 0, (Time(2), Time(3)))
    assert equal_on(a, b, I04, modulo_isolated=True)


def test_equal_on_ignores_a_transition_at_the_right_end():
    a = Signal(I04, 0, (Time(4),))
    b = constant(0, I04)
    assert equal_on(a, b, I04, modulo_isolated=True)
    assert not equal_on(a, b, I04, modulo_isolated=False)


def test_invalid_signals_rejected():
    with pytest.raises(ValueError):
        Signal(I04, 2)
    with pytest.raises(ValueError):
        Signal(I04, 0, (Time(2), Time(1)))
    with pytest.raises(ValueError):
        Signal(I04, 0, (Time(0),))
    with pytest.raises(ValueError):
        Signal(I04, 0, (Time(5),))


def test_limit_examples():
    chain = [Execution(Interval(Time(-i), Time(i)), {"out": constant(0, Interval(Time(-i), Time(i)))})
             for i in range(1, 101)]
    lim = limit_of_covering(chain, closure="constant")
    assert lim.interval == Interval(NEG_INF, INF)
    assert lim["out"].is_constant() and lim["out"].init == 0
    assert restrict(lim["out"], Interval(Time(-100), Time(100))) == chain[-1]["out"]
    assert limit_of_covering(chain[:1]) == chain[0]
    bad = [chain[0], Execution(chain[1].interval, {"out": Signal(chain[1].interval, 0, (Time(0),))})]
    with pytest.raises(CoveringError):
        limit_of_covering(bad)
    with pytest.raises(CoveringError):
        limit_of_covering([chain[1], chain[0]])


def test_pointwise_only_records_value_changes():
    a = Signal(I04, 0, (Time(1), Time(3)))
    b = Signal(I04, 1, (Time(2),))
    out = pointwise(lambda x, y: x & y, [a, b])
    assert out.init == 0 and out.transitions == (Time(1), Time(2))


@given(signals(), st.data())
def test_restrict_twice_is_restrict_once(s, data):
    I = data.draw(subintervals(s.domain))
    J = data.draw(subintervals(I))
    assert restrict(restrict(s, I), J) == restrict(s, J)


@given(signals(irr=True), st.data())
def test_restrict_preserves_values(s, data):
    I = data.draw(subintervals(s.domain))
    r = restrict(s, I)
    pts = [I.lo, I.hi] + [t for t in s.transitions if t in I]
    pts += [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    for t in pts:
        assert r.value_at(t) == s.value_at(t)


@given(signals(irr=True))
def test_file_roundtrip(s):
    assert parse_signals(format_signal("p", s)) == {"p": s}


@given(signals(den=8), st.data())
def test_transition_count_matches_grid_scan(s, data):
    I = data.draw(subintervals(s.domain, den=8))
    # every transition lies on the 1/8 grid, so a 1/16 grid sees every value change
    grid = [I.lo + Fraction(k, 16) for k in range(((I.hi - I.lo) * 16).floor() + 1)]
    vals = [s.value_at(t) for t in grid]
    changes = sum(a != b for a, b in zip(vals, vals[1:]))
    assert s.count_transitions(I) == changes


@given(signals(), signals())
def test_first_difference_is_a_difference(a, b):
    t = first_difference(a, b, a.domain)
    if t is None:
        assert a == b
    else:
        assert a.value_at(t) != b.value_at(t)
        for u in [x for x in a.transitions + b.transitions if x < t]:
            assert a.value_at(u) == b.value_at(u)
