"""Watchdog-timed memory cell.

The output is 1 at ``t`` iff some ``t'`` in ``(t - T, t)`` had output 0 and
input 1.  Operationally: whenever the output is low while the input is high
the cell triggers, goes high and falls back exactly ``T`` later.  Triggers
are impossible while the output is high, so the cell's whole state at any
instant is either "low" or "high until u" with ``u`` at most ``T`` ahead.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

from ..signals import Execution, Signal, equal_on, first_difference, restrict
from ..timebase import ZERO, Interval, Time, as_time
from .base import ConfigurationError, ModuleSpec, Verdict, check_ports


@dataclass(frozen=True)
class MemParams:
    T: Time

    def __post_init__(self):
        T = as_time(self.T)
        if T <= ZERO:
            raise ConfigurationError("Mem window T must be positive")
        object.__setattr__(self, "T", T)


@dataclass(frozen=True)
class MemInit:
    """State at the interval start: low (``until`` is None) or high until ``until``."""

    until: Time | None = None


def mem_generate(params: MemParams, X: Signal, interval: Interval, init: MemInit | None = None) -> Signal:
    x = restrict(X, interval)
    lo, hi, T = interval.lo, interval.hi, params.T
    until = None if init is None or init.until is None else as_time(init.until)
    if until is not None and not (lo < until <= lo + T):
        raise ValueError(f"Mem state 'high until {until}' not within ({lo}, {lo + T}]")
    y = 1 if until is not None else 0
    if y == 0 and x.init == 1:
        y, until = 1, lo + T
    y0 = y
    out = []
    xs = x.transitions
    i = 0
    while True:
        nxt_x = xs[i] if i < len(xs) else None
        if until is not None and (nxt_x is None or until <= nxt_x):
            t = until
        elif nxt_x is not None:
            t = nxt_x
        else:
            break
        if t > hi:
            break
        prev = y
        if until is not None and t == until:
            y, until = 0, None
        while i < len(xs) and xs[i] <= t:
            i += 1
        xv = x.init ^ (i & 1)
        if y == 0 and xv == 1:
            y, until = 1, t + T
        if y != prev:
            out.append(t)
    return Signal(interval, y0, tuple(out))


def _intersect(s1: list, s2: list) -> list:
    out = []
    i = j = 0
    while i < len(s1) and j < len(s2):
        a = max(s1[i][0], s2[j][0])
        b = min(s1[i][1], s2[j][1])
        if a < b:
            out.append((a, b))
        if s1[i][1] < s2[j][1]:
            i += 1
        else:
            j += 1
    return out


def _state_when_never_falling(x: Signal, T: Time, interval: Interval):
    """Find ``u`` in ``(lo, lo+T]`` such that re-triggers at every ``u + jT``
    before ``hi`` keep the output high through the interval, or None."""
    lo, hi = interval.lo, interval.hi
    if lo + T >= hi:
        return lo + T
    far = lo + T + T
    highs = x.high_intervals()
    allowed = [(lo, far)]
    j = 0
    while lo + T * j < hi:
        shift = T * j
        # X must be high at u + jT unless that instant is at or after hi
        cand = _merge([(a - shift, b - shift) for a, b in highs] + [(hi - shift, far)])
        allowed = _intersect(allowed, cand)
        if not allowed:
            return None
        j += 1
    for a, b in allowed:
        if a <= lo + T and b > lo:
            if a > lo:
                return a
            return lo + T if b > lo + T else (lo + b) / 2
    return None


def _merge(pieces: list) -> list:
    pieces = sorted(pieces, key=lambda p: p[0])
    out: list = []
    for a, b in pieces:
        if not a < b:
            continue
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1] = (out[-1][0], b)
        else:
            out.append((a, b))
    return out


def mem_state_at_start(params: MemParams, X: Signal, Y: Signal, interval: Interval):
    """The unique state (or a witness state) at the interval start consistent
    with the observed output, or None when there is none."""
    T, lo, hi = params.T, interval.lo, interval.hi
    y = restrict(Y, interval)
    if y.init == 0:
        return MemInit(None)
    falls = [f for f in y.falling_edges() if f != hi]
    if falls:
        f = falls[0]
        k = ((f - lo) / T).floor()
        u = f - T * k
        if u == lo:
            u = u + T
        return MemInit(u)
    u = _state_when_never_falling(restrict(X, interval), T, interval)
    return None if u is None else MemInit(u)


def mem_check(params: MemParams, X: Signal, Y: Signal, interval: Interval) -> Verdict:
    st = mem_state_at_start(params, X, Y, interval)
    if st is None:
        return Verdict.fail("output stays high longer than any chain of triggers allows", interval.lo)
    expect = mem_generate(params, X, interval, st)
    got = restrict(Y, interval)
    if equal_on(got, expect, interval):
        return Verdict.ok(until=st.until)
    return Verdict.fail("output violates the watchdog predicate", first_difference(got, expect, interval))


class MemSpec(ModuleSpec):
    kind = "mem"
    inputs = ("X",)
    outputs = ("Y",)
    stateful = True

    def __init__(self, T=1, name: str = "Mem"):
        self.p = MemParams(T)
        self.name = name

    @property
    def T(self) -> Time:
        return self.p.T

    def params(self) -> dict:
        return {"T": str(self.p.T)}

    def check(self, execution: Execution, interval: Interval) -> Verdict:
        check_ports(self, execution)
        return mem_check(self.p, execution["X"], execution["Y"], interval)

    def generate(self, inputs, strategy, interval, init=None, key=""):
        return {"Y": mem_generate(self.p, inputs["X"], interval, init)}


def falls_are_T_after_triggers(params: MemParams, X: Signal, Y: Signal) -> bool:
    """Every falling edge of ``Y`` lies exactly ``T`` after the last trigger."""
    rises = Y.rising_edges()
    for f in Y.falling_edges():
        i = bisect_right(rises, f) - 1
        if i < 0:
            continue
        last = rises[i]
        chain = last
        while chain + params.T < f:
            chain = chain + params.T
        if chain + params.T != f:
            return False
    return True
