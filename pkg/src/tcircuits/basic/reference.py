"""Behavioural reference specifications used as implementation targets."""

from __future__ import annotations

from ..signals import Execution, Signal, equal_on, first_difference, from_high_intervals, pointwise, restrict
from ..timebase import ZERO, Interval, Time, Unbounded, as_time
from .base import ConfigurationError, ModuleSpec, Verdict, check_ports


# -- oscillator ---------------------------------------------------------------

def osc_expected(T: Time, d: Time, delta: Time, interval: Interval) -> Signal:
    """High on ``[delta + zP, delta + zP + T)`` for all integers z, ``P = T + d``."""
    P = T + d
    lo, hi = interval.lo, interval.hi
    z0 = ((lo - delta) / P).floor() - 1
    z1 = ((hi - delta) / P).floor() + 1
    highs = [(delta + P * z, delta + P * z + T) for z in range(z0, z1 + 1)]
    return from_high_intervals(interval, highs)


def osc_spec_check(Y: Signal, T, d, interval: Interval) -> Verdict:
    """Periodic high-``T`` / low-``d`` output with some phase offset.

    On success ``detail["delta"]`` holds the fitted offset in ``[0, T + d)``.
    """
    T, d = as_time(T), as_time(d)
    if T <= ZERO or d <= ZERO:
        raise ConfigurationError("OSC needs T > 0 and d > 0")
    P = T + d
    if isinstance(interval.lo, Unbounded) or isinstance(interval.hi, Unbounded):
        return Verdict.fail("finitely many transitions cannot oscillate forever",
                            None if not Y.transitions else Y.transitions[-1])
    lo, hi = interval.lo, interval.hi
    y = restrict(Y, interval)
    ts = [t for t in y.transitions if t != hi]
    if not ts:
        if lo == hi:
            return Verdict.ok(delta=lo.mod(P))
        if y.init == 1:
            if hi - lo <= T:
                return Verdict.ok(delta=lo.mod(P))
            return Verdict.fail("high phase longer than T", lo + T)
        if hi - lo <= d:
            return Verdict.ok(delta=hi.mod(P))
        return Verdict.fail("low phase longer than d", lo + d)
    first = ts[0]
    rising = y.init == 0
    delta = first.mod(P) if rising else (first - T).mod(P)
    expect = osc_expected(T, d, delta, interval)
    if equal_on(y, expect, interval):
        return Verdict.ok(delta=delta)
    return Verdict.fail("output is not periodic with high phase T and low phase d",
                        first_difference(y, expect, interval), delta=delta)


class OscSpec(ModuleSpec):
    kind = "osc"
    inputs = ()
    outputs = ("Y",)
    generatable = True

    def __init__(self, T=1, d=1, name: str = "OSC"):
        self.T, self.d = as_time(T), as_time(d)
        if self.T <= ZERO or self.d <= ZERO:
            raise ConfigurationError("OSC needs T > 0 and d > 0")
        self.name = name

    def params(self) -> dict:
        return {"T": str(self.T), "d": str(self.d)}

    def onset_offsets(self) -> tuple:
        return (self.T, self.d)

    def check(self, execution: Execution, interval: Interval) -> Verdict:
        check_ports(self, execution)
        return osc_spec_check(execution["Y"], self.T, self.d, interval)

    def generate(self, inputs, strategy, interval, init=None, key=""):
        delta = strategy.pick(f"{key or self.name}:delta", ZERO, self.T + self.d)
        if delta == self.T + self.d:
            delta = ZERO
        return {"Y": osc_expected(self.T, self.d, delta, interval)}


# -- weird module --------------------------------------------------------------

def wm_spec_check(out: Signal, interval: Interval, complete: bool = False) -> Verdict:
    """At most one transition, rising from 0 to 1.

    A finite execution without the rise is feasible (the rise may come later)
    unless it is declared ``complete`` or its interval is unbounded above.
    """
    s = restrict(out, interval)
    hi = interval.hi
    ts = [t for t in s.transitions if isinstance(hi, Unbounded) or t != hi]
    if len(ts) > 1:
        return Verdict.fail("more than one transition", ts[1])
    if ts and s.init == 1:
        return Verdict.fail("the only transition must be rising", ts[0])
    if isinstance(interval.lo, Unbounded) and s.init == 1:
        return Verdict.fail("output must start at 0", None)
    final = s.init ^ (len(ts) & 1)
    if final == 0 and (complete or isinstance(hi, Unbounded)):
        return Verdict.fail("output never rises", None)
    return Verdict.ok(rise=ts[0] if ts else None)


class WMSpec(ModuleSpec):
    kind = "wm"
    inputs = ()
    outputs = ("out",)
    generatable = False

    def __init__(self, name: str = "WM"):
        self.name = name

    def check(self, execution: Execution, interval: Interval) -> Verdict:
        check_ports(self, execution)
        return wm_spec_check(execution["out"], interval)


# -- enabled oscillator --------------------------------------------------------

class EnabledOscSpec(ModuleSpec):
    """Output 0 while EN is 0; while EN is 1 a square wave of period 2d."""

    kind = "enosc"
    inputs = ("EN",)
    outputs = ("Y",)
    generatable = False

    def __init__(self, d=1, name: str = "EnOsc"):
        self.d = as_time(d)
        self.name = name

    def params(self) -> dict:
        return {"d": str(self.d)}

    def onset_offsets(self) -> tuple:
        return (self.d,)

    def check(self, execution: Execution, interval: Interval) -> Verdict:
        check_ports(self, execution)
        en = restrict(execution["EN"], interval)
        y = execution["Y"]
        for a, b, v in en.pieces():
            if a == b:
                continue
            piece = Interval(a, b)
            if v == 0:
                if not equal_on(y, Signal(piece, 0, ()), piece):
                    return Verdict.fail("Y not 0 while EN is 0", first_difference(y, Signal(piece, 0, ()), piece))
            else:
                r = osc_spec_check(y, self.d, self.d, piece)
                if not r:
                    return r
        return Verdict.ok()


# -- adders --------------------------------------------------------------------

def stable_windows(inputs: list, interval: Interval, d: Time) -> list:
    """Stretches ``[s, e]`` of ``interval`` where every input has been constant
    on ``[t - d, t]`` within the interval, with the input values there."""
    lo, hi = interval.lo, interval.hi
    sigs = [restrict(s, interval) for s in inputs]
    events = sorted({t for s in sigs for t in s.transitions})
    starts = [lo] + events
    out = []
    for i, e in enumerate(starts):
        end = starts[i + 1] if i + 1 < len(starts) else hi
        s = e + d
        if s < end:
            out.append((s, end, tuple(sig.value_at(e) for sig in sigs)))
    return out


def _check_outputs_const(outs: list, values: tuple, s: Time, e: Time):
    win = Interval(s, e)
    for sig, v in zip(outs, values):
        if not equal_on(sig, Signal(win, v, ()), win):
            return first_difference(sig, Signal(win, v, ()), win)
    return None


class AdderSpec(ModuleSpec):
    """Outputs equal the 2-bit sum whenever the inputs have been stable for ``d``."""

    kind = "adder"
    inputs = ("A0", "B0")
    outputs = ("Y0", "Y1")
    generatable = False

    def __init__(self, d=1, name: str = "Adder"):
        self.d = as_time(d)
        self.name = name

    def params(self) -> dict:
        return {"d": str(self.d)}

    def onset_offsets(self) -> tuple:
        return (self.d,)

    def check(self, execution: Execution, interval: Interval) -> Verdict:
        check_ports(self, execution)
        outs = [execution["Y0"], execution["Y1"]]
        for s, e, (a, b) in stable_windows([execution["A0"], execution["B0"]], interval, self.d):
            bad = _check_outputs_const(outs, (a ^ b, a & b), s, e)
            if bad is not None:
                return Verdict.fail(f"sum of {a}+{b} not output after stable inputs", bad)
        return Verdict.ok()


def tmr_ports():
    ins = tuple(f"{x}0_{k}" for x in "AB" for k in (1, 2, 3))
    outs = tuple(f"Y{j}_{k}" for j in (0, 1) for k in (1, 2, 3))
    return ins, outs


class TMRAdderSpec(ModuleSpec):
    """Triplicated adder: whenever the majority input pair has been stable for
    ``d``, at least two output replicas carry the correct sum."""

    kind = "adder_tmr"
    generatable = False

    def __init__(self, d=1, name: str = "AdderTMR"):
        self.d = as_time(d)
        self.name = name
        self.inputs, self.outputs = tmr_ports()

    def params(self) -> dict:
        return {"d": str(self.d)}

    def onset_offsets(self) -> tuple:
        return (self.d,)

    def check(self, execution: Execution, interval: Interval) -> Verdict:
        check_ports(self, execution)
        maj = lambda a, b, c: (a & b) | (a & c) | (b & c)
        A = pointwise(maj, [restrict(execution[f"A0_{k}"], interval) for k in (1, 2, 3)])
        B = pointwise(maj, [restrict(execution[f"B0_{k}"], interval) for k in (1, 2, 3)])
        for s, e, (a, b) in stable_windows([A, B], interval, self.d):
            win = Interval(s, e)
            want = (a ^ b, a & b)
            good = []
            for k in (1, 2, 3):
                pair = [execution[f"Y0_{k}"], execution[f"Y1_{k}"]]
                good.append(_replica_good(pair, want, win))
            bad = _majority_failure(good, win)
            if bad is not None:
                return Verdict.fail(f"fewer than two replicas output {a}+{b}", bad)
        return Verdict.ok()


def _replica_good(pair: list, want: tuple, win: Interval) -> Signal:
    """Signal on ``win`` that is 1 where the replica outputs ``want``."""
    sigs = [restrict(s, win) for s in pair]
    return pointwise(lambda y0, y1: int(y0 == want[0] and y1 == want[1]), sigs)


def _majority_failure(good: list, win: Interval):
    ok = pointwise(lambda a, b, c: (a & b) | (a & c) | (b & c), good)
    if equal_on(ok, Signal(win, 1, ()), win):
        return None
    return first_difference(ok, Signal(win, 1, ()), win)
