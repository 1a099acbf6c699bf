"""Forgetfulness, self-stabilization checks and the Mem-oscillator experiments."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

from .basic import ChannelInit, ChannelSpec, GateSpec, InterfaceError, MemInit, MemSpec, ModuleSpec, OscSpec
from .basic import Verdict, osc_spec_check
from .faults import random_inputs
from .library import mem_osc
from .netlist import Netlist, NotApplicable, longest_weighted_path
from .signals import Execution, Signal, equal_on, restrict
from .simulate import FaultPlan, check_feasible, simulate
from .strategy import POLICIES, AdversaryStrategy, random_rational
from .timebase import ZERO, Interval, Time, as_time


# -- forgetfulness -------------------------------------------------------------

@dataclass
class ForgetfulnessDecl:
    """Per-submodule forgetfulness constants ``F_S`` (None = undeclared)."""

    values: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = {k: None if v is None else as_time(v) for k, v in self.values.items()}
        for k, v in self.values.items():
            if v is not None and v < ZERO:
                raise ValueError(f"{k}: forgetfulness constant must be >= 0, got {v}")

    @classmethod
    def derive(cls, n: Netlist) -> "ForgetfulnessDecl":
        """Defaults: pure and bounded channels are d-forgetful, gates 0-forgetful.
        Mem, inertial channels and random sources stay undeclared."""
        vals = {}
        for i, m in n.modules.items():
            if isinstance(m, ChannelSpec) and m.p.mode in ("pure", "bounded"):
                vals[i] = m.d
            elif isinstance(m, GateSpec):
                vals[i] = ZERO
            else:
                vals[i] = None
        return cls(vals)

    @classmethod
    def load(cls, path, n: Netlist | None = None) -> "ForgetfulnessDecl":
        doc = json.loads(Path(path).read_text())
        base = cls.derive(n).values if n is not None else {}
        base.update(doc.get("forgetful", doc))
        return cls(base)

    def to_dict(self) -> dict:
        return {k: None if v is None else str(v) for k, v in sorted(self.values.items())}


def forgetful_bound(n: Netlist, decl: ForgetfulnessDecl | Mapping | None = None) -> Time:
    """Longest path through the circuit graph weighted by ``F_S``."""
    if decl is None:
        decl = ForgetfulnessDecl.derive(n)
    elif not isinstance(decl, ForgetfulnessDecl):
        decl = ForgetfulnessDecl(dict(decl))
    return longest_weighted_path(n, decl.values)


def _max_delay(n: Netlist) -> Time:
    ds = [m.d for m in n.modules.values() if isinstance(m, ChannelSpec)]
    ds += [m.T for m in n.modules.values() if isinstance(m, MemSpec)]
    return max(ds, default=ZERO)


def random_init(n: Netlist, rng, lo: Time, max_pulses: int = 3, extreme: int | None = None) -> dict:
    """Adversarial boundary conditions for every stateful submodule.

    ``extreme`` 0 or 1 gives the all-low or all-high state; otherwise each
    channel carries up to ``max_pulses`` random pulses in flight and each Mem
    is low or high until a random instant.
    """
    init = {}
    for i, m in n.modules.items():
        if isinstance(m, ChannelSpec):
            if extreme is not None:
                init[i] = ChannelInit(extreme, ())
                continue
            k = rng.randint(0, max_pulses)
            ts = sorted({random_rational(rng, lo, lo + m.d, 1 << 10) for _ in range(2 * k)} - {lo})
            init[i] = ChannelInit(rng.randint(0, 1), tuple(ts))
        elif isinstance(m, MemSpec):
            if extreme == 0 or (extreme is None and rng.randint(0, 1) == 0):
                init[i] = MemInit(None)
            elif extreme == 1:
                init[i] = MemInit(lo + m.T)
            else:
                u = random_rational(rng, lo, lo + m.T, 1 << 10)
                init[i] = MemInit(u if u > lo else lo + m.T)
    return init


@dataclass
class ForgetfulResult:
    F: Time
    trials: int
    refuted: bool
    witness: dict | None = None

    def to_dict(self) -> dict:
        return {
            "F": str(self.F),
            "trials": self.trials,
            "verdict": "refuted" if self.refuted else "passed",
            "note": "one-sided: a pass is evidence, a refutation is a witness",
            "witness": self.witness,
        }


def _prehistory(ports, window: Interval, rng, complement_of: dict | None = None) -> dict:
    if complement_of is not None:
        return {p: s.invert() for p, s in complement_of.items()}
    return random_inputs(ports, window, rng, max_transitions=6)


def _splice(pre: Signal, body: Signal, domain: Interval, t_minus: Time) -> Signal:
    """``pre`` before ``t_minus`` and ``body`` from ``t_minus`` on."""
    head = [t for t in pre.transitions if t < t_minus]
    v = pre.init ^ (len(head) & 1)
    if body.value_at(t_minus) != v:
        head.append(t_minus)
    head += [t for t in body.transitions if t > t_minus]
    return Signal(domain, pre.init, tuple(head))


def test_forgetful(
    M: Netlist,
    F,
    trials: int = 100,
    seed: int = 0,
    interval: Interval | None = None,
    prehistory=None,
    policies=POLICIES,
) -> ForgetfulResult:
    """Sampled test that outputs on ``[t- + F, t+]`` ignore everything before ``t-``.

    Each trial fixes the inputs on ``interval`` and runs ``M`` from two
    different pre-histories (inputs and in-flight state before ``t-``).  The
    second run replays the strategy of the first; if it disagrees, every
    other sampled strategy is tried before the trial counts as a refutation.
    """
    F = as_time(F)
    if F < ZERO:
        raise ValueError("F must be >= 0")
    interval = interval or Interval(Time(0), Time(10))
    t_minus, t_plus = interval.lo, interval.hi
    L = as_time(prehistory) if prehistory is not None else 2 * max(F, _max_delay(M), Time(1))
    full = Interval(t_minus - L, t_plus)
    pre_win = Interval(t_minus - L, t_minus)
    check_win = Interval(t_minus + F, t_plus)
    for trial in range(trials):
        strat = AdversaryStrategy(seed * 1_000_003 + trial, policies[trial % len(policies)])
        rng = strat.rng("forgetful")
        body = random_inputs(M.inputs, interval, rng)
        pre1 = _prehistory(M.inputs, pre_win, rng)
        pre2 = _prehistory(M.inputs, pre_win, rng, pre1 if trial == 0 else None)
        init1 = random_init(M, rng, full.lo, extreme=0 if trial == 0 else None)
        init2 = random_init(M, rng, full.lo, extreme=1 if trial == 0 else None)
        in1 = {p: _splice(pre1[p], body[p], full, t_minus) for p in M.inputs}
        in2 = {p: _splice(pre2[p], body[p], full, t_minus) for p in M.inputs}
        E1 = simulate(M, in1, full, strat, init=init1)
        if check_win.lo > check_win.hi:
            continue
        candidates = [strat] + [strat.with_seed(strat.seed * 7 + k + 1).with_policy(pol)
                                for k, pol in enumerate(policies)]
        matched = False
        for s2 in candidates:
            E2 = simulate(M, in2, full, s2, init=init2)
            if all(equal_on(E1[p], E2[p], check_win) for p in M.outputs):
                matched = True
                break
        if not matched:
            diff = {}
            for p in M.outputs:
                if not equal_on(E1[p], E2[p], check_win):
                    diff[p] = {
                        "run1": [str(t) for t in restrict(E1[p], check_win).transitions],
                        "run2": [str(t) for t in restrict(E2[p], check_win).transitions],
                    }
            return ForgetfulResult(F, trial + 1, True, {"trial": trial, "seed": strat.seed,
                                                        "window": check_win.text(), "outputs": diff})
    return ForgetfulResult(F, trials, False)


# -- self-stabilization ----------------------------------------------------------

@dataclass
class StabTrial:
    trial: int
    seed: int
    init: dict
    feasible: bool
    onset: Time | None
    reason: str = ""

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "seed": self.seed,
            "init": self.init,
            "verdict": "pass" if self.feasible else "fail",
            "onset": None if self.onset is None else str(self.onset),
            **({"reason": self.reason} if self.reason else {}),
        }


@dataclass
class StabilizationReport:
    T: Time
    horizon: Interval
    trials: list

    @property
    def passed(self) -> bool:
        return all(t.feasible for t in self.trials)

    @property
    def worst_onset(self) -> Time | None:
        """Latest onset over all trials; None when some trial never becomes feasible."""
        if any(t.onset is None for t in self.trials):
            return None
        return max((t.onset for t in self.trials), default=None)

    def to_dict(self) -> dict:
        w = self.worst_onset
        return {
            "T": str(self.T),
            "horizon": self.horizon.text(),
            "passed": self.passed,
            "trials": len(self.trials),
            "failures": sum(not t.feasible for t in self.trials),
            "worst_onset": None if w is None else str(w),
            "onset_note": "earliest start from which the suffix is feasible",
            "per_trial": [t.to_dict() for t in self.trials],
        }


def describe_init(init: Mapping) -> dict:
    out = {}
    for i, v in sorted(init.items()):
        if isinstance(v, ChannelInit):
            out[i] = {"out": v.out_init, "pending": [str(as_time(t)) for t in v.pending]}
        elif isinstance(v, MemInit):
            out[i] = {"high_until": None if v.until is None else str(as_time(v.until))}
    return out


def suffix_check(spec: ModuleSpec, E: Execution, start: Time, hi: Time) -> Verdict:
    v = spec.check(E, Interval(start, hi))
    if v and isinstance(spec, OscSpec):
        # independent re-check through the plain function
        v2 = osc_spec_check(E["Y"], spec.T, spec.d, Interval(start, hi))
        if not v2:
            raise AssertionError(f"OSC checkers disagree at onset {start}: {v2.reason}")
    return v


def stabilization_onset(spec: ModuleSpec, E: Execution, interval: Interval) -> Time | None:
    """Earliest start with a feasible suffix, or None.

    Suffixes of feasible suffixes are feasible, so a binary search over the
    event times finds the first feasible event; the exact onset then lies
    between it and the previous event, at one of the target module's phase offsets.
    """
    lo, hi = interval.lo, interval.hi
    cands = [lo] + [t for t in E.event_times() if lo < t < hi] + [hi]
    if not spec.check(E, Interval(cands[-1], hi)):
        return None
    a, b = 0, len(cands) - 1
    while a < b:
        mid = (a + b) // 2
        if spec.check(E, Interval(cands[mid], hi)):
            b = mid
        else:
            a = mid + 1
    if a == 0:
        return cands[0]
    prev, e = cands[a - 1], cands[a]
    inner = sorted(e - c for c in spec.onset_offsets() if prev < e - c < e)
    for s in inner:
        if spec.check(E, Interval(s, hi)):
            return s
    return e


Scenario = Callable[[int, object, Interval], tuple]


def check_stabilizing(
    M: Netlist,
    M_prime: ModuleSpec,
    T,
    trials: int = 100,
    horizon: Interval | None = None,
    seed: int = 0,
    scenario: Scenario | None = None,
    max_pulses: int = 3,
    verify_trace: bool = True,
    policies=POLICIES,
) -> StabilizationReport:
    """Check that cutting the first ``T`` time units leaves an ``M_prime`` execution.

    ``scenario(trial, rng, horizon)`` may return ``(inputs, init, faults)``
    to replace the default adversarial initial conditions and random inputs.
    """
    T = as_time(T)
    if set(M.inputs) != set(M_prime.inputs) or set(M.outputs) != set(M_prime.outputs):
        raise InterfaceError(
            f"port mismatch: {sorted(M.inputs)}->{sorted(M.outputs)} "
            f"vs {sorted(M_prime.inputs)}->{sorted(M_prime.outputs)}")
    horizon = horizon or Interval(Time(0), Time(50))
    lo, hi = horizon.lo, horizon.hi
    out = []
    for trial in range(trials):
        s = seed * 1_000_003 + trial
        strat = AdversaryStrategy(s, policies[trial % len(policies)])
        rng = strat.rng("stabilize")
        faults = None
        if scenario is not None:
            inputs, init, faults = scenario(trial, rng, horizon)
        else:
            extreme = trial if trial < 2 else None
            init = random_init(M, rng, lo, max_pulses, extreme)
            inputs = random_inputs(M.inputs, horizon, rng)
        E = simulate(M, inputs, horizon, strat, init=init, faults=faults)
        if verify_trace and not (faults and (faults.overrides or faults.faulty())):
            rep = check_feasible(M, E, horizon)
            if not rep.feasible:
                raise AssertionError(f"simulator produced an infeasible run: {rep.failing()}")
        ext = E.select(list(M.inputs) + list(M.outputs))
        cut = lo + T
        if cut > hi:
            v = Verdict.ok()
        else:
            v = suffix_check(M_prime, ext, cut, hi)
        onset = stabilization_onset(M_prime, ext, horizon)
        out.append(StabTrial(trial, s, describe_init(init or {}), bool(v), onset, "" if v else v.reason))
    return StabilizationReport(T, horizon, out)


# -- the Mem oscillator ------------------------------------------------------------

class HypothesisViolated(ValueError):
    """The lemma needs T >= d."""


def _const_on(sig: Signal, a: Time, b: Time, value: int, b_closed: bool = False) -> bool:
    """``sig`` equals ``value`` on ``(a, b)`` (plus ``b`` when ``b_closed``).

    Signals are right-continuous, so the value on ``(a, next)`` is the value at ``a``.
    """
    lo, hi = sig.domain.lo, sig.domain.hi
    a = max(a, lo)
    b = min(b, hi)
    if a < b:
        if sig.value_at(a) != value:
            return False
        if any(sig.value_at(t) != value for t in sig.transitions_between(a, b, include_b=False)):
            return False
    if b_closed and a <= b and sig.value_at(b) != value:
        return False
    return True


@dataclass
class LemmaTrial:
    trial: int
    init: dict
    t_star: Time | None
    t0: Time | None
    case: str
    steps: dict
    delta: Time | None

    @property
    def ok(self) -> bool:
        return all(self.steps.values())

    def to_dict(self) -> dict:
        f = lambda t: None if t is None else str(t)  # noqa: E731
        return {"trial": self.trial, "init": self.init, "t_star": f(self.t_star), "t0": f(self.t0),
                "case": self.case, "steps": self.steps, "delta": f(self.delta)}


@dataclass
class LemmaReport:
    T: Time
    d: Time
    horizon: Time
    trials: list

    @property
    def ok(self) -> bool:
        return all(t.ok for t in self.trials)

    @property
    def max_t0(self) -> Time | None:
        ts = [t.t0 for t in self.trials if t.t0 is not None]
        return max(ts) if ts else None

    def step_counts(self) -> dict:
        counts: dict = {}
        for t in self.trials:
            for k, v in t.steps.items():
                counts[k] = counts.get(k, 0) + bool(v)
        return counts

    def to_dict(self) -> dict:
        m = self.max_t0
        return {
            "T": str(self.T), "d": str(self.d), "horizon": str(self.horizon),
            "trials": len(self.trials), "all_steps_hold": self.ok,
            "max_t0": None if m is None else str(m), "bound": str(self.T + 2 * self.d),
            "steps_holding": self.step_counts(),
            "failing_trials": [t.to_dict() for t in self.trials if not t.ok][:10],
        }


def lemma_steps(Y: Signal, X: Signal, T: Time, d: Time, H: Time) -> tuple:
    """Instrument one trace against the proof steps; returns (t*, t0, case, steps, delta)."""
    steps = {}
    P = T + d
    zeros = [t for t in (ZERO, *Y.transitions) if t <= P and Y.value_at(t) == 0]
    t_star = zeros[0] if zeros else None
    steps["1_t_star"] = t_star is not None
    if t_star is None:
        return None, None, "", steps, None
    rises = [t for t in Y.rising_edges() if t > t_star]
    t0 = min([t_star + d] + rises[:1])
    case = "a" if t0 < t_star + d else "b"
    steps["2_t0"] = t_star <= t0 <= t_star + d and _const_on(Y, t_star, t0, 0)
    steps["3_no_trigger_before"] = all(
        _const_on(X, t, u, 0) for t, u in _pieces_where(Y, t0 - T, t0, 0))
    steps["4_X_at_t0"] = X.value_at(t0) == 1
    steps["5_high"] = _const_on(Y, t0, t0 + T, 1)
    steps["6_X_low"] = _const_on(X, t0 + d, t0 + T + d, 0)
    steps["7_low"] = _const_on(Y, t0 + T, t0 + T + d, 0) and Y.value_at(t0 + T) == 0
    ind = True
    i = 1
    while t0 + i * P + P <= H:
        ti = t0 + i * P
        ind = ind and _const_on(Y, ti, ti + T, 1) and Y.value_at(ti) == 1
        ind = ind and _const_on(Y, ti + T, ti + P, 0) and Y.value_at(ti + T) == 0
        i += 1
    steps["induction"] = ind
    v = osc_spec_check(Y, T, d, Interval(t0, H))
    steps["osc_feasible"] = bool(v)
    steps["t0_bound"] = t0 <= T + 2 * d
    return t_star, t0, case, steps, v.detail.get("delta") if v else None


def _pieces_where(sig: Signal, a: Time, b: Time, value: int) -> list:
    """Maximal sub-intervals of ``(a, b)`` where ``sig`` equals ``value``."""
    lo = sig.domain.lo
    a = max(a, lo)
    if a >= b:
        return []
    pts = [a] + list(sig.transitions_between(a, b, include_b=False)) + [b]
    return [(x, y) for x, y in zip(pts, pts[1:]) if x < y and sig.value_at(x) == value]


def verify_mem_osc_lemma(T=Time(3) / 2, d=1, trials: int = 1000, seed: int = 0, horizon=50,
                         max_pulses: int = 3) -> LemmaReport:
    """Run the Mem oscillator from adversarial states and check every proof step."""
    T, d, H = as_time(T), as_time(d), as_time(horizon)
    if T < d:
        raise HypothesisViolated(f"the stabilization argument needs T >= d (T={T}, d={d})")
    n = mem_osc(T, d)
    I = Interval(ZERO, H)
    out = []
    for trial in range(trials):
        strat = AdversaryStrategy(seed * 1_000_003 + trial)
        rng = strat.rng("lemma")
        init = random_init(n, rng, ZERO, max_pulses, extreme=trial if trial < 2 else None)
        E = simulate(n, {}, I, strat, init=init)
        t_star, t0, case, steps, delta = lemma_steps(E["Mem.Y"], E["Mem.X"], T, d, H)
        out.append(LemmaTrial(trial, describe_init(init), t_star, t0, case, steps, delta))
    return LemmaReport(T, d, H, out)


# -- d > T -----------------------------------------------------------------------------

@dataclass
class CounterexampleSearch:
    T: Time
    d: Time
    horizon: Time
    candidates: int
    found: bool
    insufficient: bool = False
    init: dict | None = None
    execution: Execution | None = None
    explanation: str = ""

    def to_dict(self) -> dict:
        doc = {
            "T": str(self.T), "d": str(self.d), "horizon": str(self.horizon),
            "candidates_tried": self.candidates,
            "verdict": "found" if self.found else ("insufficient-horizon" if self.insufficient else "not-found"),
            "init": self.init, "explanation": self.explanation,
        }
        if self.execution is not None:
            doc["Y"] = [str(t) for t in self.execution["Y"].transitions]
            doc["Y_init"] = self.execution["Y"].init
        return doc


def find_counterexample_d_gt_T(T=1, d=2, budget: int = 5000, horizon=50, seed: int = 0,
                               max_pulses: int = 3) -> CounterexampleSearch:
    """Search in-flight channel contents for a Mem-oscillator run that never settles.

    A candidate is reported when the output is OSC-infeasible on the last
    ``2(T + d)`` time units; every longer suffix is then infeasible too.
    """
    T, d, H = as_time(T), as_time(d), as_time(horizon)
    P = T + d
    if H < P:
        return CounterexampleSearch(T, d, H, 0, False, True,
                                    explanation=f"horizon {H} is shorter than one period {P}")
    n = mem_osc(T, d)
    I = Interval(ZERO, H)
    tail = Interval(max(ZERO, H - 2 * P), H)
    for k in range(budget):
        strat = AdversaryStrategy(seed * 1_000_003 + k)
        rng = strat.rng("dgtT")
        init = random_init(n, rng, ZERO, max_pulses)
        E = simulate(n, {}, I, strat, init=init)
        v = osc_spec_check(E["Y"], T, d, tail)
        if v:
            continue
        rep = check_feasible(n, E, I)
        if not rep.feasible:
            raise AssertionError(f"simulator produced an infeasible run: {rep.failing()}")
        why = (f"OSC infeasible on {tail.text()} ({v.reason}, first mismatch at {v.witness}); "
               f"every suffix starting earlier is infeasible as well")
        return CounterexampleSearch(T, d, H, k + 1, True, False, describe_init(init), E, why)
    return CounterexampleSearch(T, d, H, budget, False, False,
                                explanation="every candidate settled into an OSC-feasible tail")


__all__ = [
    "CounterexampleSearch", "ForgetfulResult", "ForgetfulnessDecl", "HypothesisViolated", "LemmaReport",
    "NotApplicable", "StabilizationReport", "check_stabilizing", "find_counterexample_d_gt_T",
    "forgetful_bound", "lemma_steps", "random_init", "stabilization_onset", "test_forgetful",
    "verify_mem_osc_lemma",
]

test_forgetful.__test__ = False  # not a pytest test
