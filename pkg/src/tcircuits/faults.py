"""Crash and Byzantine fault transforms, and sampled implementation checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .basic import InterfaceError, ModuleSpec, Verdict
from .netlist import Netlist
from .signals import Execution, Signal, restrict
from .simulate import FaultPlan, check_feasible, simulate
from .strategy import POLICIES, AdversaryStrategy, hostile_signal, random_rational
from .timebase import Interval, Time, as_time

DEFAULT_RATE = 10


class CrashedSpec(ModuleSpec):
    """Behaves like ``base`` until some instant, then holds every output."""

    def __init__(self, base: ModuleSpec, t=None):
        self.base = base
        self.t = None if t is None else as_time(t)
        self.kind = base.kind
        self.name = base.name
        self.inputs, self.outputs = base.inputs, base.outputs
        self.generatable = base.generatable

    def params(self) -> dict:
        return {**self.base.params(), "crash": None if self.t is None else str(self.t)}

    def min_lag(self, strategy=None):
        return self.base.min_lag(strategy)

    def check(self, execution: Execution, interval: Interval) -> Verdict:
        v = self.base.check(execution, interval)
        if v:
            return v
        lo, hi = interval.lo, interval.hi
        last = lo
        for p in self.outputs:
            ts = [t for t in restrict(execution[p], interval).transitions if t != hi]
            if ts and ts[-1] > last:
                last = ts[-1]
        if last == lo:
            return Verdict.ok(crash=str(lo))
        head = self.base.check(execution, Interval(lo, last))
        if head:
            return Verdict.ok(crash=str(last))
        return Verdict.fail(f"not a crash of {self.name}: {head.reason}", head.witness)

    def generate(self, inputs, strategy, interval, init=None, key=""):
        outs = self.base.generate(inputs, strategy, interval, init, key)
        t = self.t
        if t is None or t > interval.hi:
            return outs
        frozen = {}
        for p, s in outs.items():
            if t <= interval.lo:
                frozen[p] = Signal(interval, s.init, ())
            else:
                frozen[p] = Signal(interval, s.init, tuple(x for x in s.transitions if x <= t))
        return frozen


class ByzantineSpec(ModuleSpec):
    """Accepts every execution; generates arbitrary rate-capped outputs."""

    def __init__(self, base: ModuleSpec, rate=DEFAULT_RATE):
        self.base = base
        self.rate = rate
        self.kind = base.kind
        self.name = base.name
        self.inputs, self.outputs = base.inputs, base.outputs

    def params(self) -> dict:
        return {**self.base.params(), "byzantine_rate": str(self.rate)}

    def min_lag(self, strategy=None):
        return self.base.min_lag(strategy)

    def check(self, execution: Execution, interval: Interval) -> Verdict:
        return Verdict.ok()

    def generate(self, inputs, strategy, interval, init=None, key=""):
        k = key or self.name
        return {p: hostile_signal(strategy, f"{k}.{p}", interval, self.rate) for p in self.outputs}


def crashify(spec: ModuleSpec, t=None) -> CrashedSpec:
    return CrashedSpec(spec, t)


def byzantinize(spec: ModuleSpec, rate=DEFAULT_RATE) -> ByzantineSpec:
    return ByzantineSpec(spec, rate)


# -- sampled implementation checks ---------------------------------------------

@dataclass
class Counterexample:
    trial: int
    seed: int
    policy: str
    reason: str
    witness: Time | None
    execution: Execution
    faults: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "seed": self.seed,
            "policy": self.policy,
            "reason": self.reason,
            "witness": None if self.witness is None else str(self.witness),
            "faults": self.faults,
        }


@dataclass
class ImplementsResult:
    refuted: bool
    trials: int
    counterexample: Counterexample | None = None
    fault_set: tuple = ()

    @property
    def verdict(self) -> str:
        return "refuted" if self.refuted else f"passed {self.trials} trials"

    def to_dict(self) -> dict:
        return {
            "fault_set": list(self.fault_set),
            "verdict": "refuted" if self.refuted else "passed",
            "trials": self.trials,
            "note": "one-sided: refutations are genuine, passes are evidence only",
            "counterexample": None if self.counterexample is None else self.counterexample.to_dict(),
        }


def random_inputs(ports, interval: Interval, rng, max_transitions: int = 4) -> dict:
    """A few random transitions per port, at rational times inside the interval."""
    out = {}
    for p in ports:
        k = rng.randint(0, max_transitions)
        ts = sorted({random_rational(rng, interval.lo, interval.hi, 256) for _ in range(k)})
        out[p] = Signal(interval, rng.randint(0, 1), tuple(t for t in ts if t > interval.lo))
    return out


def _ports(M) -> tuple:
    return tuple(M.inputs), tuple(M.outputs)


def check_implements(
    M,
    M_prime: ModuleSpec,
    trials: int = 100,
    seed: int = 0,
    interval: Interval | None = None,
    inputs: Callable | None = None,
    fault_type: str | None = None,
    targets: tuple = (),
    rate=DEFAULT_RATE,
    crash_window: Interval | None = None,
    init: Mapping | None = None,
    policies=POLICIES,
    verify_trace: bool = True,
) -> ImplementsResult:
    """Sample executions of ``M`` (netlist or spec) and check them against ``M_prime``.

    ``inputs(trial, rng, interval)`` supplies input signals.  With a
    ``fault_type`` the submodules in ``targets`` fail (crash or Byzantine).
    """
    ins, outs = _ports(M)
    if set(ins) != set(M_prime.inputs) or set(outs) != set(M_prime.outputs):
        raise InterfaceError(
            f"port mismatch: {sorted(ins)}->{sorted(outs)} vs {sorted(M_prime.inputs)}->{sorted(M_prime.outputs)}")
    interval = interval or Interval(Time(0), Time(10))
    is_net = isinstance(M, Netlist)
    if fault_type not in (None, "crash", "byzantine"):
        raise ValueError(f"unknown fault type {fault_type!r}")
    for trial in range(trials):
        policy = policies[trial % len(policies)]
        s = seed * 1_000_003 + trial
        strat = AdversaryStrategy(s, policy)
        rng = strat.rng("inputs")
        sigs = inputs(trial, rng, interval) if inputs else random_inputs(ins, interval, rng)
        plan = FaultPlan()
        if fault_type == "byzantine":
            plan.byzantine = {i: rate for i in targets}
        elif fault_type == "crash":
            win = crash_window or interval
            plan.crashes = {i: strat.pick(f"crash:{i}", win.lo, win.hi) for i in targets}
        if is_net:
            E = simulate(M, sigs, interval, strat, init=init, faults=plan)
            if verify_trace:
                weakened = {i: (byzantinize(M.modules[i], rate) if fault_type == "byzantine"
                                else crashify(M.modules[i], plan.crashes.get(i)))
                            for i in targets}
                rep = check_feasible(M, E, interval, specs=weakened)
                if not rep.feasible:
                    raise AssertionError(f"simulator produced an infeasible run: {rep.failing()}")
        else:
            spec = M
            if fault_type == "byzantine":
                spec = byzantinize(M, rate)
            elif fault_type == "crash":
                spec = crashify(M, strat.pick("crash", interval.lo, interval.hi))
            E = Execution(interval, {**sigs, **spec.generate(sigs, strat, interval, init)})
        ext = E.select(list(ins) + list(outs))
        v = M_prime.check(ext, interval)
        if not v:
            cx = Counterexample(trial, s, policy, v.reason, v.witness, E, plan.describe())
            return ImplementsResult(True, trial + 1, cx, tuple(targets))
    return ImplementsResult(False, trials, None, tuple(targets))


@dataclass
class ToleranceReport:
    f: int
    fault_type: str
    results: list

    @property
    def tolerant(self) -> bool:
        return not any(r.refuted for r in self.results)

    def failing(self) -> list:
        return [r for r in self.results if r.refuted]

    def to_dict(self) -> dict:
        return {
            "f": self.f,
            "fault_type": self.fault_type,
            "tolerant": self.tolerant,
            "fault_sets": [r.to_dict() for r in self.results],
        }


def check_f_tolerant(
    M: Netlist,
    M_prime: ModuleSpec,
    f: int,
    fault_type: str,
    trials: int = 100,
    sites: Mapping | None = None,
    **kwargs,
) -> ToleranceReport:
    """Run ``check_implements`` for every set of at most ``f`` fault sites.

    A site is a named group of submodules that fail together; by default each
    submodule is its own site.
    """
    sites = dict(sites or {i: (i,) for i in M.modules})
    for name, members in sites.items():
        for i in members:
            if i not in M.modules:
                raise ValueError(f"fault site {name!r} names unknown submodule {i!r}")
    if f > len(sites):
        raise ValueError(f"f={f} exceeds the number of fault sites ({len(sites)})")
    results = []
    for k in range(f + 1):
        for combo in itertools.combinations(sorted(sites), k):
            targets = tuple(sorted({i for c in combo for i in sites[c]}))
            r = check_implements(M, M_prime, trials, fault_type=fault_type if combo else None,
                                 targets=targets, **kwargs)
            r.fault_set = combo
            results.append(r)
    return ToleranceReport(f, fault_type, results)


def adder_scenario(switch=Time(1)):
    """Inputs that switch at ``switch`` from a random combination to a target
    combination; the target cycles through all four combinations."""

    def make(trial, rng, interval):
        a, b = divmod(trial % 4, 2)
        a0, b0 = rng.randint(0, 1), rng.randint(0, 1)
        sig = {}
        for port, old, new in (("A0", a0, a), ("B0", b0, b)):
            sig[port] = Signal(interval, old, (switch,) if old != new else ())
        return sig

    return make


def tmr_scenario(switch=Time(1)):
    base = adder_scenario(switch)

    def make(trial, rng, interval):
        s = base(trial, rng, interval)
        return {f"{x}0_{k}": s[f"{x}0"] for x in "AB" for k in (1, 2, 3)}

    return make
