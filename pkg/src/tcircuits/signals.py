"""Binary piecewise-constant signals on intervals, and executions.

Signals are stored right-continuously: the value on ``[t_i, t_{i+1})`` is
constant and flips at every stored transition.  A transition can never sit
at the lower domain bound (it would be absorbed into the initial value).
Comparisons that are meant to ignore finitely many isolated points ignore
transitions placed exactly at the upper bound of the compared interval.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .timebase import INF, NEG_INF, Interval, Time, Unbounded, as_time

__all__ = [
    "Signal",
    "Execution",
    "SignalDomainError",
    "CoveringError",
    "constant",
    "from_high_intervals",
    "pointwise",
    "value_at",
    "restrict",
    "equal_on",
    "limit_of_covering",
]


class SignalDomainError(ValueError):
    """A query or restriction fell outside a signal's domain."""


class CoveringError(ValueError):
    """A sequence of executions is not a covering."""


@dataclass(frozen=True)
class Signal:
    domain: Interval
    init: int
    transitions: tuple = ()

    def __post_init__(self):
        if self.init not in (0, 1):
            raise ValueError("signal values are bits")
        ts = tuple(as_time(t) for t in self.transitions)
        lo, hi = self.domain.lo, self.domain.hi
        for i, t in enumerate(ts):
            if i and not ts[i - 1] < t:
                raise ValueError("transitions must be strictly increasing")
            if not isinstance(lo, Unbounded) and t <= lo:
                raise ValueError(f"transition {t} not after domain start {lo}")
            if t > hi:
                raise ValueError(f"transition {t} beyond domain end {hi}")
        object.__setattr__(self, "transitions", ts)

    # -- queries -------------------------------------------------------
    @property
    def lo(self):
        return self.domain.lo

    @property
    def hi(self):
        return self.domain.hi

    def value_at(self, t) -> int:
        t = as_time(t)
        if not _in_closure(self.domain, t):
            raise SignalDomainError(f"time {t} outside signal domain {self.domain}")
        return self.init ^ (bisect_right(self.transitions, t) & 1)

    def value_before(self, t) -> int:
        """Left limit at ``t`` (equals the initial value at the domain start)."""
        t = as_time(t)
        return self.init ^ (bisect_left(self.transitions, t) & 1)

    @property
    def final(self) -> int:
        return self.init ^ (len(self.transitions) & 1)

    def transitions_between(self, a, b, include_a=False, include_b=True) -> tuple:
        ts = self.transitions
        i = bisect_left(ts, a) if include_a else bisect_right(ts, a)
        j = bisect_right(ts, b) if include_b else bisect_left(ts, b)
        return ts[i:j]

    def count_transitions(self, interval: Interval | None = None) -> int:
        if interval is None:
            return len(self.transitions)
        return len(self.transitions_between(interval.lo, interval.hi))

    def pieces(self):
        """Yield ``(start, end, value)`` for every maximal constant piece."""
        start = self.domain.lo
        v = self.init
        for t in self.transitions:
            yield (start, t, v)
            start = t
            v ^= 1
        yield (start, self.domain.hi, v)

    def high_intervals(self) -> list:
        """Half-open ``[a, b)`` stretches where the signal is 1."""
        return [(a, b) for a, b, v in self.pieces() if v == 1 and not _same(a, b)]

    def rising_edges(self) -> tuple:
        v = self.init
        out = []
        for t in self.transitions:
            v ^= 1
            if v == 1:
                out.append(t)
        return tuple(out)

    def falling_edges(self) -> tuple:
        v = self.init
        out = []
        for t in self.transitions:
            v ^= 1
            if v == 0:
                out.append(t)
        return tuple(out)

    def is_constant(self) -> bool:
        return not self.transitions

    # -- transforms ----------------------------------------------------
    def restrict(self, interval: Interval) -> "Signal":
        return restrict(self, interval)

    def shift(self, delta) -> "Signal":
        delta = as_time(delta)
        dom = Interval(self.domain.lo + delta, self.domain.hi + delta,
                       self.domain.lo_closed, self.domain.hi_closed)
        return Signal(dom, self.init, tuple(t + delta for t in self.transitions))

    def invert(self) -> "Signal":
        return Signal(self.domain, 1 - self.init, self.transitions)

    def with_domain(self, domain: Interval, before: int | None = None) -> "Signal":
        """Re-domain the signal, extending constantly where necessary.

        ``before`` is the value used on the part of ``domain`` that lies before
        the current domain start; the default is the current initial value.
        """
        if domain.lo < self.domain.lo:
            init = self.init if before is None else before
            ts = list(self.transitions)
            if before is not None and before != self.init:
                if isinstance(self.domain.lo, Unbounded):
                    raise SignalDomainError("cannot prepend to an unbounded signal")
                ts.insert(0, self.domain.lo)
        else:
            init = self.value_at(domain.lo)
            ts = [t for t in self.transitions if t > domain.lo]
        ts = [t for t in ts if t <= domain.hi]
        return Signal(domain, init, tuple(ts))

    def __str__(self):
        ts = ", ".join(str(t) for t in self.transitions)
        return f"Signal({self.domain}, init={self.init}, [{ts}])"


def _same(a, b) -> bool:
    if isinstance(a, Unbounded) or isinstance(b, Unbounded):
        return a == b
    return a == b


def _in_closure(dom: Interval, t: Time) -> bool:
    return not (t < dom.lo or t > dom.hi)


def constant(value: int, domain: Interval) -> Signal:
    return Signal(domain, value, ())


def from_high_intervals(domain: Interval, highs: Iterable) -> Signal:
    """Build a signal that is 1 exactly on the given ``[a, b)`` stretches."""
    edges: list = []
    for a, b in sorted(((as_time(a), as_time(b)) for a, b in highs), key=lambda p: p[0]):
        if not a < b:
            continue
        if edges and edges[-1] >= a:
            if b > edges[-1]:
                edges[-1] = b
            continue
        edges.extend([a, b])
    init = 0
    ts = []
    lo, hi = domain.lo, domain.hi
    for i, t in enumerate(edges):
        rising = i % 2 == 0
        if t <= lo:
            init = 1 if rising else 0
            continue
        if t > hi:
            break
        ts.append(t)
    return Signal(domain, init, tuple(ts))


def pointwise(fn: Callable[..., int], signals: Sequence[Signal]) -> Signal:
    """Apply a boolean function pointwise to signals sharing one domain."""
    if not signals:
        raise ValueError("pointwise needs at least one signal")
    dom = signals[0].domain
    for s in signals[1:]:
        if s.domain != dom:
            raise SignalDomainError("pointwise operands must share a domain")
    vals = [s.init for s in signals]
    init = int(fn(*vals))
    events = sorted({t for s in signals for t in s.transitions})
    cur = init
    out = []
    for t in events:
        v = int(fn(*(s.value_at(t) for s in signals)))
        if v != cur:
            out.append(t)
            cur = v
    return Signal(dom, init, tuple(out))


def value_at(s: Signal, t) -> int:
    return s.value_at(t)


def restrict(s: Signal, interval: Interval) -> Signal:
    if not s.domain.contains_interval(interval):
        raise SignalDomainError(f"{interval} is not inside signal domain {s.domain}")
    if isinstance(interval.lo, Unbounded):
        init = s.init
        ts = s.transitions
    else:
        init = s.value_at(interval.lo)
        ts = s.transitions_between(interval.lo, INF if isinstance(interval.hi, Unbounded) else interval.hi)
    if not isinstance(interval.hi, Unbounded):
        ts = tuple(t for t in ts if t <= interval.hi)
    return Signal(interval, init, ts)


def equal_on(s1: Signal, s2: Signal, interval: Interval, modulo_isolated: bool = True) -> bool:
    """Pointwise equality on ``interval``.

    With ``modulo_isolated`` the two right-continuous signals may differ at
    finitely many isolated instants; for stored signals that means a
    transition exactly at the interval's upper bound is disregarded.
    """
    a = restrict(s1, interval)
    b = restrict(s2, interval)
    if a.init != b.init:
        return False
    ta, tb = a.transitions, b.transitions
    if modulo_isolated and not isinstance(interval.hi, Unbounded):
        hi = interval.hi
        ta = tuple(t for t in ta if t != hi)
        tb = tuple(t for t in tb if t != hi)
    return ta == tb


def first_difference(s1: Signal, s2: Signal, interval: Interval):
    """Earliest instant in ``interval`` where the signals differ, or None."""
    a = restrict(s1, interval)
    b = restrict(s2, interval)
    if a.init != b.init:
        return interval.lo
    for x, y in zip(a.transitions, b.transitions):
        if x != y:
            return min(x, y)
    la, lb = len(a.transitions), len(b.transitions)
    if la != lb:
        return (a.transitions[lb] if la > lb else b.transitions[la])
    return None


@dataclass(frozen=True)
class Execution:
    """An interval plus one signal per port, all on that interval."""

    interval: Interval
    signals: Mapping[str, Signal] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "signals", dict(self.signals))

    def __getitem__(self, port: str) -> Signal:
        try:
            return self.signals[port]
        except KeyError:
            raise KeyError(f"execution has no signal for port {port!r}") from None

    def __contains__(self, port) -> bool:
        return port in self.signals

    @property
    def ports(self) -> list:
        return sorted(self.signals)

    def restrict(self, interval: Interval) -> "Execution":
        return Execution(interval, {p: restrict(s, interval) for p, s in self.signals.items()})

    def select(self, ports: Iterable[str], rename: Mapping[str, str] | None = None) -> "Execution":
        rename = rename or {}
        return Execution(self.interval, {rename.get(p, p): self.signals[p] for p in ports})

    def event_times(self) -> list:
        return sorted({t for s in self.signals.values() for t in s.transitions})

    def same_as(self, other: "Execution", modulo_isolated: bool = False) -> bool:
        if self.interval != other.interval or set(self.signals) != set(other.signals):
            return False
        return all(
            equal_on(self.signals[p], other.signals[p], self.interval, modulo_isolated)
            for p in self.signals
        )


def limit_of_covering(chain: Sequence[Execution], closure: str | None = None) -> Execution:
    """Unique execution on the union of a nested chain of executions.

    ``closure="constant"`` closes a finite prefix of an infinite covering by
    extending every signal constantly to the whole real line.
    """
    if not chain:
        raise CoveringError("empty covering")
    for i in range(len(chain) - 1):
        a, b = chain[i], chain[i + 1]
        if not b.interval.contains_interval(a.interval):
            raise CoveringError(f"interval {i} is not nested in interval {i + 1}")
        if set(a.signals) != set(b.signals):
            raise CoveringError(f"executions {i} and {i + 1} have different ports")
        for p in a.signals:
            if not equal_on(a.signals[p], b.signals[p], a.interval, modulo_isolated=False):
                raise CoveringError(f"execution {i + 1} disagrees with execution {i} on port {p}")
    last = chain[-1]
    if closure is None:
        return last
    if closure != "constant":
        raise ValueError(f"unknown closure rule {closure!r}")
    line = Interval(NEG_INF, INF)
    sigs = {p: Signal(line, s.init, s.transitions) for p, s in last.signals.items()}
    return Execution(line, sigs)
