"""FIFO channels: pure delay, bounded delay and inertial delay."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..signals import Execution, Signal, equal_on, first_difference, restrict
from ..strategy import AdversaryStrategy
from ..timebase import ZERO, Interval, Time, as_time
from .base import ConfigurationError, ModuleSpec, Verdict, check_ports

MODES = ("pure", "bounded", "inertial")


@dataclass(frozen=True)
class ChannelParams:
    mode: str
    d: Time
    threshold: Time | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigurationError(f"unknown channel mode {self.mode!r}")
        d = as_time(self.d)
        object.__setattr__(self, "d", d)
        if self.mode == "inertial":
            if self.threshold is None:
                raise ConfigurationError("inertial channel needs a threshold")
            th = as_time(self.threshold)
            if th <= ZERO:
                raise ConfigurationError("inertial threshold must be positive")
            object.__setattr__(self, "threshold", th)
            if d < ZERO:
                raise ConfigurationError("channel delay must be non-negative")
        elif d <= ZERO:
            raise ConfigurationError("channel delay bound d must be positive")


@dataclass(frozen=True)
class ChannelInit:
    """Boundary condition: output value at the interval start and the
    output transitions already in flight, all within ``(lo, lo + d]``."""

    out_init: int | None = None
    pending: tuple = ()


def inertial_filter(times, threshold: Time) -> list:
    """Cancel every pulse shorter than ``threshold`` (stack discipline)."""
    stack: list = []
    for t in times:
        if stack and t - stack[-1] < threshold:
            stack.pop()
        else:
            stack.append(t)
    return stack


def _fix_parity(pending: list, out_init: int, in_value: int, at: Time) -> list:
    """Make in-flight transitions consistent with the input value at the start."""
    if (out_init ^ (len(pending) & 1)) == in_value:
        return pending
    if pending and pending[-1] == at:
        return pending[:-1]
    return pending + [at]


def channel_generate(
    params: ChannelParams,
    in_sig: Signal,
    strategy: AdversaryStrategy,
    interval: Interval,
    init: ChannelInit | None = None,
    key: str = "chn",
) -> Signal:
    sig = restrict(in_sig, interval)
    lo, hi, d = interval.lo, interval.hi, params.d
    init = init or ChannelInit()
    out_init = sig.init if init.out_init is None else init.out_init
    pending = [as_time(p) for p in init.pending]
    for p in pending:
        if not (lo < p <= lo + d):
            raise ValueError(f"in-flight transition {p} outside ({lo}, {lo + d}]")
    if d == ZERO:
        # nothing can be in flight; the output starts at the input value
        out_init = sig.init
    pending = _fix_parity(pending, out_init, sig.init, lo + d)

    if params.mode == "pure":
        outs = pending + [t + d for t in sig.transitions]
    elif params.mode == "bounded":
        outs = list(pending)
        last = outs[-1] if outs else None
        for t in sig.transitions:
            o = t + strategy.delay(f"{key}@{t}", d)
            if last is not None and o <= last:
                o = last + (t + d - last) * Fraction(1, 1024)
            outs.append(o)
            last = o
    else:
        outs = inertial_filter(pending + [t + d for t in sig.transitions], params.threshold)
    return Signal(interval, out_init, tuple(o for o in outs if o <= hi))


def channel_check(params: ChannelParams, in_sig: Signal, out_sig: Signal, interval: Interval) -> Verdict:
    """Is the channel correct during ``interval``?

    The input may extend before ``interval``; up to ``d`` of that history is
    used.  Whatever history is not observed is chosen freely.
    """
    lo, hi, d = interval.lo, interval.hi, params.d
    a_lo = max(in_sig.lo, lo - d)
    if a_lo > lo:
        raise ValueError("input signal must cover the checked interval")
    inp = restrict(in_sig, Interval(a_lo, hi))
    out = restrict(out_sig, interval)
    if params.mode == "pure":
        return _check_pure(inp, out, d, interval)
    if params.mode == "bounded":
        return _check_bounded(inp, out, d, interval)
    return _check_inertial(inp, out, d, params.threshold, interval)


def _check_pure(inp: Signal, out: Signal, d: Time, interval: Interval) -> Verdict:
    start = max(interval.lo, inp.lo + d)
    if start > interval.hi:
        return Verdict.ok()
    window = Interval(start, interval.hi)
    shifted = inp.shift(d).with_domain(window) if start > inp.lo + d else inp.shift(d)
    shifted = restrict(shifted, window)
    if equal_on(out, shifted, window):
        return Verdict.ok()
    w = first_difference(out, shifted, window)
    return Verdict.fail("output is not the input delayed by d", w)


def _check_bounded(inp: Signal, out: Signal, d: Time, interval: Interval) -> Verdict:
    lo, hi = interval.lo, interval.hi
    a_lo = inp.lo
    A = list(inp.transitions)
    B = [b for b in out.transitions if b != hi]
    v_in, v_out = inp.init, out.init
    n, m = len(A), len(B)

    options = []
    k = 0
    while k <= m:
        if k > 0 and B[k - 1] > a_lo + d:
            break
        if v_out == v_in ^ (k & 1):
            options.append((k, 0))
        k += 1
    p = 1
    while p <= n and A[p - 1] <= lo:
        if v_out == v_in ^ (p & 1):
            options.append((0, p))
        p += 1

    best = None
    for k, p in options:
        l = m - k
        if p + l > n:
            fail_at = B[k + (n - p)] if n - p < l else None
            cand = (k + max(0, n - p), fail_at, "output transition without a matching input")
            best = _better(best, cand)
            continue
        ok = True
        for j in range(l):
            a, b = A[p + j], B[k + j]
            if not (a <= b <= a + d):
                ok = False
                best = _better(best, (k + j, b, f"output transition at {b} not within [0, d] of input {a}"))
                break
        if not ok:
            continue
        if p + l < n and A[p + l] + d < hi:
            best = _better(best, (m, A[p + l], f"input transition at {A[p + l]} never delivered"))
            continue
        return Verdict.ok(matched=l, pre_history=k, delivered_before=p)
    # one more pre-history delivery may still be pending beyond the interval
    if (not B or B[-1] <= a_lo + d) and a_lo + d >= hi and v_out == v_in ^ ((m + 1) & 1):
        return Verdict.ok(matched=0, pre_history=m + 1, delivered_before=0)
    if best is None:
        return Verdict.fail("initial output value inconsistent with any input history", lo)
    return Verdict.fail(best[2], best[1])


def _better(best, cand):
    if best is None or cand[0] > best[0]:
        return cand
    return best


def _check_inertial(inp: Signal, out: Signal, d: Time, th: Time, interval: Interval) -> Verdict:
    lo, hi = interval.lo, interval.hi
    a_lo = inp.lo
    D = [t + d for t in inp.transitions]
    B = [b for b in out.transitions if b != hi]
    edge = a_lo + d
    P = [b for b in B if b <= edge]
    for x, y in zip(P, P[1:]):
        if y - x < th:
            return Verdict.fail("pulse shorter than the inertial threshold", y)
    v_in, v_out = inp.init, out.init

    cases = [(list(P), v_in ^ (len(P) & 1))]
    if D:
        low = D[0] - th
        if P and P[-1] + th > low:
            low = P[-1] + th
        if low < edge:
            cases.append((list(P) + [None], v_in ^ 1 ^ (len(P) & 1)))
    if edge >= hi and (not P or edge - P[-1] >= th):
        # a pre-history delivery still pending beyond the interval
        cases.append((list(P) + [edge], v_in ^ 1 ^ (len(P) & 1)))

    first_bad = None
    for pre, expect_init in cases:
        if expect_init != v_out:
            continue
        stack = list(pre)
        for t in D:
            if stack and (stack[-1] is None or t - stack[-1] < th):
                stack.pop()
            else:
                stack.append(t)
        finals = [stack]
        if stack and stack[-1] is not None and stack[-1] > hi + d - th:
            finals.append(stack[:-1])
        for st in finals:
            vis = [x for x in st if x is not None and lo < x < hi]
            if vis == B:
                return Verdict.ok()
            diff = next((min(x, y) for x, y in zip(vis, B) if x != y), None)
            if diff is None:
                diff = (vis + B)[min(len(vis), len(B))] if len(vis) != len(B) else lo
            if first_bad is None or diff > first_bad:
                first_bad = diff
    return Verdict.fail("output does not match inertially filtered input", first_bad or lo)


class ChannelSpec(ModuleSpec):
    kind = "channel"
    inputs = ("in",)
    outputs = ("out",)
    stateful = True

    def __init__(self, mode: str = "pure", d=1, threshold=None, name: str = "Chn"):
        self.p = ChannelParams(mode, d, threshold)
        self.name = name

    @property
    def d(self) -> Time:
        return self.p.d

    def params(self) -> dict:
        out = {"mode": self.p.mode, "d": str(self.p.d)}
        if self.p.threshold is not None:
            out["threshold"] = str(self.p.threshold)
        return out

    def check(self, execution: Execution, interval: Interval) -> Verdict:
        check_ports(self, execution)
        return channel_check(self.p, execution["in"], execution["out"], interval)

    def generate(self, inputs, strategy, interval, init=None, key=""):
        return {"out": channel_generate(self.p, inputs["in"], strategy, interval, init, key or self.name)}

    def min_lag(self, strategy=None) -> Time:
        if self.p.mode in ("pure", "inertial"):
            return self.p.d
        if strategy is not None and strategy.policy == "maximal":
            return self.p.d
        if strategy is not None:
            return min(strategy.min_delay, self.p.d)
        return ZERO
