"""Input-free signal sources."""

from __future__ import annotations

from ..signals import Execution, Signal, equal_on, first_difference, from_high_intervals, restrict
from ..strategy import AdversaryStrategy
from ..timebase import ZERO, Interval, Time, as_time
from .base import ConfigurationError, ModuleSpec, Verdict, check_ports

SOURCE_KINDS = ("constant", "step", "pulse", "random-pulse")


def _pulse(interval: Interval, t0: Time, width: Time) -> Signal:
    return from_high_intervals(interval, [(t0, t0 + width)])


def source_generate(kind: str, strategy: AdversaryStrategy, interval: Interval, *, value: int = 1,
                    t0=ZERO, width=None, wmin=None, wmax=None, key: str = "src") -> Signal:
    t0 = as_time(t0)
    if kind == "constant":
        return Signal(interval, int(value), ())
    if kind == "step":
        v = int(value)
        if t0 <= interval.lo:
            return Signal(interval, v, ())
        if t0 > interval.hi:
            return Signal(interval, 1 - v, ())
        return Signal(interval, 1 - v, (t0,))
    if kind == "pulse":
        if width is None or as_time(width) <= ZERO:
            raise ConfigurationError("pulse needs a positive width")
        return _pulse(interval, t0, as_time(width))
    if kind == "random-pulse":
        lo_w, hi_w = as_time(wmin), as_time(wmax)
        if not ZERO < lo_w <= hi_w:
            raise ConfigurationError("random-pulse needs 0 < wmin <= wmax")
        return _pulse(interval, t0, strategy.pick(f"{key}:width", lo_w, hi_w))
    raise ConfigurationError(f"unknown source kind {kind!r}; expected one of {SOURCE_KINDS}")


class SourceSpec(ModuleSpec):
    kind = "source"
    inputs = ()
    outputs = ("out",)

    def __init__(self, source: str = "constant", value: int = 1, t0=0, width=None,
                 wmin=None, wmax=None, name: str = "Src"):
        if source not in SOURCE_KINDS:
            raise ConfigurationError(f"unknown source kind {source!r}; expected one of {SOURCE_KINDS}")
        self.source = source
        self.value = int(value)
        self.t0 = as_time(t0)
        self.width = None if width is None else as_time(width)
        self.wmin = None if wmin is None else as_time(wmin)
        self.wmax = None if wmax is None else as_time(wmax)
        self.name = name
        if source == "random-pulse" and (self.wmin is None or self.wmax is None):
            raise ConfigurationError("random-pulse needs wmin and wmax")

    def params(self) -> dict:
        out = {"source": self.source}
        if self.source in ("constant", "step"):
            out["value"] = self.value
        if self.source != "constant":
            out["t0"] = str(self.t0)
        if self.width is not None:
            out["width"] = str(self.width)
        if self.source == "random-pulse":
            out["wmin"], out["wmax"] = str(self.wmin), str(self.wmax)
        return out

    def generate(self, inputs, strategy, interval, init=None, key=""):
        sig = source_generate(self.source, strategy, interval, value=self.value, t0=self.t0,
                              width=self.width, wmin=self.wmin, wmax=self.wmax, key=key or self.name)
        return {"out": sig}

    def check(self, execution: Execution, interval: Interval) -> Verdict:
        check_ports(self, execution)
        got = restrict(execution["out"], interval)
        if self.source != "random-pulse":
            expect = self.generate({}, AdversaryStrategy(), interval)["out"]
            if equal_on(got, expect, interval):
                return Verdict.ok()
            return Verdict.fail("source output differs", first_difference(got, expect, interval))
        cands = {self.wmin, self.wmax}
        for t in got.transitions:
            cands.add(min(max(t - self.t0, self.wmin), self.wmax))
        if isinstance(interval.hi, Time):
            cands.add(min(max(interval.hi - self.t0, self.wmin), self.wmax))
        for w in sorted(cands):
            if equal_on(got, _pulse(interval, self.t0, w), interval):
                return Verdict.ok(width=w)
        return Verdict.fail("output is not a single pulse of admissible width",
                            got.transitions[0] if got.transitions else interval.lo)
