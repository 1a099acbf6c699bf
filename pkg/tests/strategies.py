"""Hypothesis strategies for exact times, signals and intervals."""

from fractions import Fraction

from hypothesis import strategies as st

from tcircuits import Interval, Signal, Time

small_fracs = st.fractions(min_value=-20, max_value=20, max_denominator=64)
small_irr = st.fractions(min_value=-10, max_value=10, max_denominator=16)
times = st.builds(Time, small_fracs, small_irr)
rational_times = st.builds(Time, small_fracs)


@st.composite
def grid_times(draw, lo=0, hi=10, den=16):
    k = draw(st.integers(lo * den, hi * den))
    return Time(Fraction(k, den))


@st.composite
def signals(draw, lo=0, hi=10, den=16, max_transitions=8, irr=False):
    """A signal on [lo, hi] with grid (optionally sqrt2-shifted) transitions."""
    dom = Interval(Time(lo), Time(hi))
    ks = draw(st.sets(st.integers(lo * den + 1, hi * den), max_size=max_transitions))
    ts = sorted(Time(Fraction(k, den)) for k in ks)
    if irr and ts:
        shift = Time(0, Fraction(1, 1000))
        ts = [t + shift if t + shift <= dom.hi else t for t in ts]
        ts = sorted(set(ts))
    return Signal(dom, draw(st.integers(0, 1)), tuple(ts))


@st.composite
def subintervals(draw, dom: Interval, den=16):
    lo, hi = dom.lo, dom.hi
    n = ((hi - lo) * den).floor()
    a = draw(st.integers(0, n))
    b = draw(st.integers(a, n))
    return Interval(lo + Fraction(a, den), lo + Fraction(b, den))
