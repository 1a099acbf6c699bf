"""Event-driven construction of executions of compound modules.

Each instant is processed in three phases.  First, everything scheduled for
the instant takes effect (channel deliveries, Mem timeouts, input and source
transitions).  Then the zero-lag submodules (gates, Mem, channels that may
deliver without delay) are evaluated once in topological order.  Finally the
positive-lag channels sample their inputs and schedule deliveries.  Values
that toggle and return within one instant leave no trace in the recorded
signals.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .basic import ChannelInit, ChannelSpec, GateSpec, MemInit, MemSpec, ModuleSpec, Verdict
from .basic.channel import inertial_filter
from .netlist import Netlist, validate, zero_lag_order
from .signals import Execution, Signal, equal_on, restrict
from .strategy import AdversaryStrategy, hostile_signal
from .timebase import Interval, Time, as_time

DEFAULT_BUDGET = 200_000


class SimulationError(ValueError):
    """The netlist cannot be simulated (invalid, or a zero-delay cycle)."""


class BudgetExceeded(RuntimeError):
    def __init__(self, budget: int, port: str):
        super().__init__(f"event budget {budget} exceeded; most active port: {port}")
        self.budget = budget
        self.port = port


class MissingPortError(KeyError):
    """An execution lacks the signal of an internal port."""


@dataclass
class FaultPlan:
    """Faults injected into a simulation run.

    ``overrides`` maps a submodule output port (``"inst.port"``) to a signal
    whose domain is the window during which that signal replaces the natural
    output.  ``crashes`` maps instances to crash times.  ``byzantine`` maps
    instances to the transition-rate cap of their arbitrary outputs.
    """

    overrides: dict = field(default_factory=dict)
    crashes: dict = field(default_factory=dict)
    byzantine: dict = field(default_factory=dict)

    def faulty(self) -> set:
        return set(self.crashes) | set(self.byzantine)

    def describe(self) -> dict:
        return {
            "overrides": {p: {"window": s.domain.text(), "init": s.init,
                              "transitions": [str(t) for t in s.transitions]}
                          for p, s in sorted(self.overrides.items())},
            "crashes": {i: str(t) for i, t in sorted(self.crashes.items())},
            "byzantine": {i: str(r) for i, r in sorted(self.byzantine.items())},
        }


class _Chan:
    __slots__ = ("spec", "inp", "out", "last_in", "last_sched", "stack")

    def __init__(self, spec, inp, out):
        self.spec = spec
        self.inp = inp
        self.out = out
        self.last_in = 0
        self.last_sched = None
        self.stack = []


def simulate(
    n: Netlist,
    inputs: Mapping[str, Signal],
    interval: Interval,
    strategy: AdversaryStrategy | None = None,
    init: Mapping | None = None,
    faults: FaultPlan | None = None,
    budget: int = DEFAULT_BUDGET,
    stats: dict | None = None,
) -> Execution:
    """Construct one execution of ``n`` on ``interval``.

    The result has a signal for every exported port and for every submodule
    port, the latter named ``"inst.port"``.
    """
    strategy = strategy or AdversaryStrategy()
    init = dict(init or {})
    faults = faults or FaultPlan()
    problems = validate(n)
    if problems:
        raise SimulationError("invalid netlist: " + "; ".join(map(str, problems)))
    try:
        order = zero_lag_order(n, strategy)
    except ValueError as exc:
        raise SimulationError(str(exc)) from None
    if not interval.bounded:
        raise SimulationError("simulation needs a bounded interval")
    lo, hi = interval.lo, interval.hi
    for p in n.inputs:
        if p not in inputs:
            raise SimulationError(f"no signal for exported input {p!r}")
    in_sigs = {}
    for p in n.inputs:
        if not inputs[p].domain.contains_interval(interval):
            raise SimulationError(f"input {p!r}: signal domain {inputs[p].domain} does not cover {interval}")
        in_sigs[p] = restrict(inputs[p], interval)
    for i in list(faults.crashes) + list(faults.byzantine):
        if i not in n.modules:
            raise SimulationError(f"fault target {i!r} is not a submodule")
    for p in faults.overrides:
        if p not in n.submodule_outputs():
            raise SimulationError(f"override target {p!r} is not a submodule output")

    drivers = n.drivers()
    nat: dict = {}
    eff: dict = {}
    heap: list = []
    seq = itertools.count()

    def push(t, kind, payload):
        heapq.heappush(heap, (t, next(seq), kind, payload))

    # -- fault hooks ---------------------------------------------------
    overrides = dict(faults.overrides)
    for inst, rate in faults.byzantine.items():
        for p in n.modules[inst].outputs:
            overrides[f"{inst}.{p}"] = hostile_signal(strategy, f"{inst}.{p}", interval, rate)
    crash_ports = {f"{i}.{p}": as_time(t) for i, t in faults.crashes.items() for p in n.modules[i].outputs}
    frozen: dict = {}
    hooked = set(overrides) | set(crash_ports)

    ovr: dict = {}

    def refresh(port: str, t: Time):
        if port not in hooked:
            eff[port] = nat[port]
        elif ovr.get(port) is not None:
            eff[port] = ovr[port]
        elif port in frozen:
            eff[port] = frozen[port]
        else:
            eff[port] = nat[port]

    def val(port: str) -> int:
        return eff[drivers[port]]

    # -- static signals ------------------------------------------------
    sources = {}
    for inst, m in n.modules.items():
        if m.kind == "source":
            sources[inst] = m.generate({}, strategy, interval, key=inst)["out"]
    for p, sig in in_sigs.items():
        v = sig.init
        for t in sig.transitions:
            v ^= 1
            push(t, "input", (p, v))
    for inst, sig in sources.items():
        v = sig.init
        for t in sig.transitions:
            v ^= 1
            push(t, "source", (f"{inst}.out", v))
    for p, sig in overrides.items():
        a, b = sig.domain.lo, sig.domain.hi
        if b < lo or b == lo < hi or a > hi:
            continue
        v = sig.value_at(max(a, lo))
        if a <= lo:
            ovr[p] = v
        else:
            push(a, "ovr", (p, v))
        for t in sig.transitions:
            if lo < t:
                push(t, "ovr", (p, sig.value_at(t)))
        if b < hi:
            push(b, "ovr", (p, None))
    for t in crash_ports.values():
        if lo < t <= hi:
            push(t, "wake", None)

    # -- state ---------------------------------------------------------
    chans: dict = {}
    mems: dict = {}
    for inst, m in n.modules.items():
        if isinstance(m, ChannelSpec):
            if m.p.mode == "inertial" and not (Time(0) < m.p.threshold <= m.d):
                raise SimulationError(f"{inst}: simulated inertial channels need 0 < threshold <= d")
            c = _Chan(m, f"{inst}.in", f"{inst}.out")
            ci = init.get(inst) or ChannelInit()
            nat[c.out] = 0 if ci.out_init is None else ci.out_init
            chans[inst] = c
        elif isinstance(m, MemSpec):
            mi = init.get(inst) or MemInit()
            until = None if mi.until is None else as_time(mi.until)
            if until is not None and not (lo < until <= lo + m.T):
                raise SimulationError(f"{inst}: initial state 'high until {until}' outside ({lo}, {lo + m.T}]")
            mems[inst] = [1 if until is not None else 0, until]
            nat[f"{inst}.Y"] = mems[inst][0]
            if until is not None:
                push(until, "fall", inst)
        elif m.kind == "source":
            nat[f"{inst}.out"] = sources[inst].init
        elif isinstance(m, GateSpec):
            for p in m.outputs:
                nat[f"{inst}.{p}"] = 0
        else:
            raise SimulationError(f"{inst}: modules of kind {m.kind!r} cannot be simulated")
    for p, s in in_sigs.items():
        eff[p] = s.init
    for p in nat:
        refresh(p, lo)

    zero_chans = [i for i in order if i in chans]
    lag_chans = [i for i in chans if i not in zero_chans]

    def schedule(inst: str, t: Time, v: int):
        c = chans[inst]
        m = c.spec
        mode, d = m.p.mode, m.d
        if mode == "pure":
            push(t + d, "deliver", (inst, v))
            return
        if mode == "bounded":
            o = t + strategy.delay(f"{inst}@{t}", d)
            if c.last_sched is not None and o <= c.last_sched:
                o = c.last_sched + (t + d - c.last_sched) * Fraction(1, 1024)
            c.last_sched = o
            if o == t:
                nat[c.out] = v
                refresh(c.out, t)
            else:
                push(o, "deliver", (inst, v))
            return
        o = t + d
        if c.stack and c.stack[-1][0] > t and o - c.stack[-1][0] < m.p.threshold:
            c.stack.pop()[2][0] = False
        else:
            alive = [True]
            c.stack.append((o, v, alive))
            push(o, "deliver", (inst, v, alive))

    gate_plan = {
        inst: [(f"{inst}.{o}", fn, [drivers[f"{inst}.{p}"] for p in ps]) for o, (fn, ps) in m.fns.items()]
        for inst, m in n.modules.items() if isinstance(m, GateSpec)
    }

    def evaluate(t: Time, first: bool = False):
        for inst in order:
            m = n.modules[inst]
            if inst in gate_plan:
                for port, fn, srcs in gate_plan[inst]:
                    nat[port] = int(fn(*[eff[q] for q in srcs]))
                    refresh(port, t)
            elif inst in mems:
                st = mems[inst]
                if st[0] == 0 and val(f"{inst}.X") == 1:
                    st[0], st[1] = 1, t + m.T
                    push(st[1], "fall", inst)
                    nat[f"{inst}.Y"] = 1
                    refresh(f"{inst}.Y", t)
            elif inst in chans and not first:
                c = chans[inst]
                v = val(c.inp)
                if v != c.last_in:
                    c.last_in = v
                    schedule(inst, t, v)

    def sample_lagged(t: Time):
        for inst in lag_chans:
            c = chans[inst]
            v = val(c.inp)
            if v != c.last_in:
                c.last_in = v
                schedule(inst, t, v)

    def freeze(t: Time):
        # crash instants are always processed, so the value at the crash time is current
        for p, tc in crash_ports.items():
            if p not in frozen and tc <= t:
                frozen[p] = eff[p]

    # -- the first instant -------------------------------------------------
    evaluate(lo, first=True)
    for inst, c in chans.items():
        c.last_in = val(c.inp)
        ci = init.get(inst) or ChannelInit()
        out0 = nat[c.out]
        pend = sorted(as_time(p) for p in ci.pending)
        for p in pend:
            if not (lo < p <= lo + c.spec.d):
                raise SimulationError(f"{inst}: in-flight transition {p} outside ({lo}, {lo + c.spec.d}]")
        if (out0 ^ (len(pend) & 1)) != c.last_in:
            if pend and pend[-1] == lo + c.spec.d:
                pend.pop()
            else:
                pend.append(lo + c.spec.d)
        if c.spec.p.mode == "inertial":
            pend = inertial_filter(pend, c.spec.p.threshold)
        v = out0
        for p in pend:
            v ^= 1
            if c.spec.p.mode == "inertial":
                alive = [True]
                c.stack.append((p, v, alive))
                push(p, "deliver", (inst, v, alive))
            else:
                push(p, "deliver", (inst, v))
        if pend:
            c.last_sched = pend[-1]
    freeze(lo)
    for p in frozen:
        refresh(p, lo)

    ports = list(n.inputs) + list(nat)
    rec_init = {p: eff[p] for p in ports}
    rec_val = dict(rec_init)
    rec_ts: dict = {p: [] for p in ports}
    instants = 1

    while heap and heap[0][0] <= hi:
        t = heap[0][0]
        instants += 1
        if instants > budget:
            hot = max(rec_ts, key=lambda p: len(rec_ts[p]))
            raise BudgetExceeded(budget, hot)
        while heap and heap[0][0] == t:
            _, _, kind, payload = heapq.heappop(heap)
            if kind == "deliver":
                inst, v = payload[0], payload[1]
                if len(payload) == 3 and not payload[2][0]:
                    continue
                nat[chans[inst].out] = v
            elif kind == "fall":
                st = mems[payload]
                if st[1] == t:
                    st[0], st[1] = 0, None
                    nat[f"{payload}.Y"] = 0
            elif kind == "input":
                eff[payload[0]] = payload[1]
            elif kind == "source":
                nat[payload[0]] = payload[1]
            elif kind == "ovr":
                ovr[payload[0]] = payload[1]
        for p in nat:
            if p in hooked:
                refresh(p, t)
            else:
                eff[p] = nat[p]
        evaluate(t)
        sample_lagged(t)
        freeze(t)
        for p in frozen:
            refresh(p, t)
        for p in ports:
            if eff[p] != rec_val[p]:
                rec_val[p] = eff[p]
                rec_ts[p].append(t)

    sigs = {p: Signal(interval, rec_init[p], tuple(rec_ts[p])) for p in ports}
    for inst, m in n.modules.items():
        for p in m.inputs:
            sigs[f"{inst}.{p}"] = sigs[drivers[f"{inst}.{p}"]]
    for p in n.outputs:
        sigs[p] = sigs[drivers[p]]
    if stats is not None:
        stats["instants"] = instants
        stats["transitions"] = sum(len(v) for v in rec_ts.values())
    return Execution(interval, sigs)


# -- verification over fully exposed executions --------------------------------

@dataclass
class FeasibilityReport:
    interval: Interval
    verdicts: dict

    @property
    def feasible(self) -> bool:
        return all(v.feasible for v in self.verdicts.values())

    def __bool__(self):
        return self.feasible

    def failing(self) -> list:
        return sorted(i for i, v in self.verdicts.items() if not v.feasible)

    def to_dict(self) -> dict:
        return {
            "interval": self.interval.text(),
            "feasible": self.feasible,
            "view": "glass-box (all internal ports observed)",
            "submodules": {
                i: {"feasible": v.feasible, "reason": v.reason,
                    "witness": None if v.witness is None else str(v.witness)}
                for i, v in sorted(self.verdicts.items())
            },
        }


def local_execution(n: Netlist, inst: str, E: Execution) -> Execution:
    m = n.modules[inst]
    sigs = {}
    for p in (*m.inputs, *m.outputs):
        key = f"{inst}.{p}"
        if key not in E:
            raise MissingPortError(f"execution lacks internal port {key!r}")
        sigs[p] = E[key]
    return Execution(E.interval, sigs)


def check_feasible(n: Netlist, E: Execution, interval: Interval | None = None,
                   specs: Mapping[str, ModuleSpec] | None = None) -> FeasibilityReport:
    """Check every submodule (and every wire) on ``interval``.

    ``specs`` replaces the specification of selected instances, e.g. by a
    fault-weakened one.
    """
    interval = interval or E.interval
    specs = dict(specs or {})
    verdicts = {}
    drivers = n.drivers()
    for dst, src in drivers.items():
        for p in (dst, src):
            if p not in E:
                raise MissingPortError(f"execution lacks port {p!r}")
        if E[dst] is not E[src] and not _same_on(E[dst], E[src], interval):
            verdicts[f"wire:{src}->{dst}"] = Verdict.fail("wire endpoints carry different signals", interval.lo)
    for inst, m in n.modules.items():
        spec = specs.get(inst, m)
        verdicts[inst] = spec.check(local_execution(n, inst, E), interval)
    return FeasibilityReport(interval, verdicts)


def _same_on(a: Signal, b: Signal, interval: Interval) -> bool:
    return equal_on(a, b, interval, modulo_isolated=False)
