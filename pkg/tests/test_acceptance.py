"""Acceptance harness: one PASS/FAIL line per criterion, with wall time.

Under pytest the lines are repeated in the terminal summary; run the file
directly (``python3 tests/test_acceptance.py``) to get only the lines.
"""

import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nets import channel_net, dag_net  # noqa: E402
from oracles import brute_longest, espf_brute, mp_of  # noqa: E402
from tcircuits import (AdderSpec, AdversaryStrategy, EnabledOscSpec, Execution, FaultPlan, Interval,  # noqa: E402
                       Netlist, OscSpec, Signal, Time, TMRAdderSpec, check_f_tolerant, check_feasible, simulate)
from tcircuits.basic import (ChannelParams, ChannelSpec, GateSpec, MemParams, MemSpec, SourceSpec,  # noqa: E402
                             channel_check, mem_check, osc_spec_check, wm_spec_check)
from tcircuits.delay_class import espf_prime, espf_settling, espf_simulated, wm_demo  # noqa: E402
from tcircuits.faults import (adder_scenario, byzantinize, crashify, random_inputs, tmr_scenario)  # noqa: E402
from tcircuits.library import EXAMPLES, adder, adder_sites, adder_tmr, mem_osc, oscillator  # noqa: E402
from tcircuits.repro import FIG2_FAULT, FIG6_FAULT, fig2_scenario  # noqa: E402
from tcircuits.signals import restrict  # noqa: E402
from tcircuits.stabilization import (check_stabilizing, find_counterexample_d_gt_T, forgetful_bound,  # noqa: E402
                                     random_init, test_forgetful, verify_mem_osc_lemma)
from tcircuits.strategy import POLICIES, random_rational  # noqa: E402
from tcircuits.timebase import SQRT2  # noqa: E402
from tcircuits.traceio import csv_text  # noqa: E402

RESULTS = []
EPS = mpmath.mpf(10) ** -40


def run_criterion(num, title, limit, body):
    t0 = time.perf_counter()
    try:
        ok, detail = body()
    except Exception as exc:  # a crash is a failure, reported like one
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    took = time.perf_counter() - t0
    in_time = limit is None or took < limit
    budget = "" if limit is None else f" (limit {limit}s)"
    line = (f"{'PASS' if ok and in_time else 'FAIL'} criterion {num:>2}: {title}; {detail}; "
            f"{took:.2f}s{budget}")
    RESULTS.append(line)
    print(line)
    return ok and in_time, line


# -- 1 ---------------------------------------------------------------------------------

def c1():
    I = Interval(Time(0), Time(4))
    E = simulate(oscillator(1), {"EN": Signal(I, 1, ())}, I)
    Y = E["Y"]
    events = [t for t in E.event_times() if t - 1 >= I.lo]
    inverse = all(Y.value_at(t) == 1 - Y.value_at(t - 1) for t in events)
    exact = list(Y.transitions) == [Time(k) for k in (1, 2, 3, 4)]
    feas = check_feasible(oscillator(1), E).feasible
    return exact and inverse and feas, f"Y transitions {[str(t) for t in Y.transitions]}, Y(t)=not Y(t-1) {inverse}"


# -- 2 ---------------------------------------------------------------------------------

def c2():
    n = oscillator(1)
    I = Interval(Time(-1), Time(12))
    E = simulate(n, {"EN": Signal(I, 0, (Time(0),))}, I, faults=FaultPlan(overrides={"Chn.out": FIG2_FAULT}))
    failing = check_feasible(n, E, Interval(Time(5), Time(6))).failing()
    H = Interval(Time(0), Time(40))
    recovered = [c for c in range(1, 21)
                 if check_stabilizing(n, EnabledOscSpec(1), c, trials=1, horizon=H, scenario=fig2_scenario(H)).passed]
    return failing == ["Chn"] and not recovered, f"infeasible on [5,6]: {failing}, cuts recovering: {recovered}"


# -- 3 ---------------------------------------------------------------------------------

SEVEN = ("1_t_star", "2_t0", "3_no_trigger_before", "4_X_at_t0", "5_high", "6_X_low", "7_low")


def c3():
    T, d = Time(3) / 2, Time(1)
    lemma = verify_mem_osc_lemma(T, d, trials=1000, seed=1, horizon=50)
    steps = all(all(t.steps.get(k) for k in SEVEN) for t in lemma.trials)
    stab = check_stabilizing(mem_osc(T, d), OscSpec(T, d), T + 2 * d, trials=1000,
                             horizon=Interval(Time(0), Time(50)), seed=1)
    ok = (len(lemma.trials) == 1000 and steps and lemma.ok and stab.passed and len(stab.trials) == 1000
          and stab.worst_onset is not None and stab.worst_onset <= T + 2 * d)
    return ok, (f"1000 trials, seven steps hold {steps}, all lemma checks {lemma.ok}, "
                f"suffix from 7/2 feasible {stab.passed}, worst onset {stab.worst_onset}")


# -- 4 ---------------------------------------------------------------------------------

def c4():
    T, d = Time(3) / 2, Time(1)
    I = Interval(Time(0), Time(10))
    E = simulate(mem_osc(T, d), {}, I, faults=FaultPlan(overrides={"Chn.out": FIG6_FAULT}))
    fit = osc_spec_check(E["Y"], T, d, Interval(Time.parse("63/10"), I.hi))
    delta = fit.detail.get("delta") if fit else None
    return bool(fit) and delta == Time.parse("3/10"), f"feasible from 63/10 {bool(fit)}, fitted delta {delta}"


# -- 5 ---------------------------------------------------------------------------------

def c5():
    T, d, H = Time(1), Time(2), Time(50)
    r = find_counterexample_d_gt_T(T, d, 5000, horizon=H, seed=0)
    if not r.found:
        return False, f"not found in {r.candidates} candidates"
    E = r.execution
    I = Interval(Time(0), H)
    never = not osc_spec_check(E["Y"], T, d, I)
    late = not osc_spec_check(E["Y"], T, d, Interval(H - 2 * (T + d), H))
    mem_ok = bool(mem_check(MemParams(T), E["Mem.X"], E["Mem.Y"], I))
    chn_ok = bool(channel_check(ChannelParams("pure", d), E["Chn.in"], E["Chn.out"], I))
    inv_ok = bool(GateSpec("NOT", name="Inv").check(E.select(["Inv.in", "Inv.out"], {"Inv.in": "in", "Inv.out": "out"}), I))
    ok = r.candidates <= 5000 and never and late and mem_ok and chn_ok and inv_ok
    return ok, (f"found after {r.candidates} candidates, OSC-infeasible on [0,50] {never} and on the last "
                f"two periods {late}, mem_check {mem_ok}, channel_check {chn_ok}, inverter {inv_ok}")


# -- 6 ---------------------------------------------------------------------------------

def c6():
    I = Interval(Time(0), Time(10))
    # 400 trials per fault set: the scenario cycles through the 4 input
    # combinations, so each combination sees 100 hostile seeds
    r = check_f_tolerant(adder(1), AdderSpec(1), 1, "byzantine", trials=400, sites=adder_sites(), interval=I,
                         inputs=adder_scenario(), seed=1, verify_trace=False)
    by = {"+".join(x.fault_set) or "none": x for x in r.results}
    adders_ok = all(not by[k].refuted and by[k].trials == 400 for k in ("none", "Add1", "Add2", "Add3"))
    voter = by["Vote"]
    voter_ok = voter.refuted and voter.counterexample is not None
    t = check_f_tolerant(adder_tmr(1), TMRAdderSpec(1), 1, "byzantine", trials=100, interval=I,
                         inputs=tmr_scenario(), seed=2, verify_trace=False)
    cx = voter.counterexample
    return adders_ok and voter_ok and t.tolerant, (
        f"single adder sites tolerated {adders_ok}, voter refuted {voter_ok}"
        f"{'' if cx is None else f' ({cx.reason} at {cx.witness})'}, TMR f=1 over {len(t.results)} fault sets "
        f"tolerated {t.tolerant}")


# -- 7 ---------------------------------------------------------------------------------

def c7():
    F = forgetful_bound(adder(1))
    rng = random.Random(7)
    agree = 0
    for _ in range(50):
        k = rng.randint(1, 12)
        nodes = [f"n{i}" for i in range(k)]
        edges = [(nodes[i], nodes[j]) for i in range(k) for j in range(i + 1, k) if rng.random() < 0.3]
        w = {v: Fraction(rng.randint(0, 40), rng.randint(1, 12)) for v in nodes}
        agree += forgetful_bound(dag_net(nodes, edges), w) == Time(brute_longest(nodes, edges, w))
    passes = not test_forgetful(adder(1), Time(1), trials=500, seed=1).refuted
    refutes = test_forgetful(channel_net(1), Time(1) / 2, trials=50, seed=1).refuted
    ok = F == Time(1) and agree == 50 and passes and refutes
    return ok, (f"adder bound {F}, DAG agreement {agree}/50, adder at F=d passes 500 trials {passes}, "
                f"pure channel at d/2 refuted {refutes}")


# -- 8 ---------------------------------------------------------------------------------

def c8():
    r = espf_settling("1/2", 20)
    pairs, _, last, _ = espf_brute(Fraction(1, 2), 20)
    exact = r.settle == Time(2) and abs(mp_of(r.settle) - last) < EPS and r.pulse_count == len(pairs)
    sweep = [espf_settling(x, 200) for x in ("1/2", "1/4", "1/8", "1/16")]
    ts = [s.settle for s in sweep]
    oracle = all(abs(mp_of(s.settle) - espf_brute(Fraction(str(s.delta)), 200)[2]) < EPS for s in sweep)
    increasing = all(t is not None for t in ts) and all(a < b for a, b in zip(ts, ts[1:]))
    same = all(espf_settling(x, 30).output == espf_simulated(x, 30) for x in ("1/2", "1/4"))
    ok = exact and oracle and increasing and same
    return ok, (f"T(1/2) = {r.settle} (oracle agrees {exact}), sweep {[str(t) for t in ts]} "
                f"increasing {increasing} oracle {oracle}, engine equals simulator {same}")


# -- 9 ---------------------------------------------------------------------------------

def c9():
    primes = {x: espf_prime(x, h) for x, h in (("2", 50), ("1/2", 50), ("1/16", 300))}
    rises = {x: len(p.output.rising_edges()) for x, p in primes.items()}
    single = all(p.output.init == 0 and n == 1 and len(p.output.transitions) == 1 for (x, p), n in
                 zip(primes.items(), rises.values()))
    rep = wm_demo(0, 100)
    cov = rep["covering"]
    wm_ok = cov["feasible_prefixes"] == 100 and not cov["limit_feasible"]
    return single and wm_ok, (f"rising edges {rises}, WM covering feasible prefixes {cov['feasible_prefixes']}, "
                              f"limit feasible {cov['limit_feasible']}")


# -- 10 ---------------------------------------------------------------------------------

I10 = Interval(Time(0), Time(10))


def _rand_time(rng, lo, hi):
    if rng.random() < 0.25:
        # an irrational point: a rational shifted by a small multiple of sqrt2
        t = random_rational(rng, lo, hi, 64) + SQRT2 * Fraction(rng.randint(-3, 3), 64)
        return t if lo <= t <= hi else random_rational(rng, lo, hi, 256)
    return random_rational(rng, lo, hi, 256)


def _rand_signal(rng, I, k=6):
    ts = sorted({_rand_time(rng, I.lo, I.hi) for _ in range(rng.randint(0, k))})
    return Signal(I, rng.randint(0, 1), tuple(t for t in ts if t > I.lo))


def _rand_sub(rng, I):
    a, b = sorted((_rand_time(rng, I.lo, I.hi), _rand_time(rng, I.lo, I.hi)))
    return Interval(a, b)


def _catalogue():
    h, s2 = Time(1) / 2, SQRT2
    specs = [ChannelSpec(m, d) for m in ("pure", "bounded") for d in (Time(1), h, s2)]
    specs += [ChannelSpec("inertial", d, threshold=th) for d in (Time(0), h, Time(1)) for th in (h, Time(1))]
    specs += [GateSpec(g, arity=a) for g in ("AND", "OR") for a in (2, 3)]
    specs += [GateSpec(g) for g in ("NOT", "BUF", "XOR", "MAJ3", "ADD1")]
    specs += [MemSpec(T) for T in (h, Time(1), Time(3) / 2, s2)]
    specs += [SourceSpec("constant", 0), SourceSpec("step", 1, t0=2), SourceSpec("pulse", 1, t0=1, width=h),
              SourceSpec("random-pulse", t0=1, wmin=Time(1) / 10, wmax=1)]
    specs += [OscSpec(Time(3) / 2, 1), OscSpec(1, s2)]
    return specs


def c10():
    rng = random.Random(20261019)
    specs = _catalogue()
    counts = dict.fromkeys(("coherence", "subset", "weakening", "restriction", "rerun"), 0)
    fails = []

    for trial in range(3000):
        spec = specs[trial % len(specs)]
        strat = AdversaryStrategy(rng.randrange(1 << 30), POLICIES[trial % 3])
        init = random_init(Netlist("one", [], [], {"M": spec}), rng, I10.lo).get("M")
        ins = {p: _rand_signal(rng, I10) for p in spec.inputs}
        E = Execution(I10, {**ins, **spec.generate(ins, strat, I10, init)})
        counts["coherence"] += 1
        if not spec.check(E, I10):
            fails.append(("coherence", spec.kind, trial))
            continue
        J = _rand_sub(rng, I10)
        counts["subset"] += 1
        if not spec.check(E, J):
            fails.append(("subset", spec.kind, trial, str(J)))
        counts["weakening"] += 1
        crash_t = _rand_time(rng, I10.lo, I10.hi)
        if not (crashify(spec, crash_t).check(E, I10) and byzantinize(spec).check(E, I10)):
            fails.append(("weakening", spec.kind, trial))
        if spec.generatable:
            counts["weakening"] += 1
            C = crashify(spec, crash_t)
            Ec = Execution(I10, {**ins, **C.generate(ins, strat, I10, init)})
            if not C.check(Ec, I10):
                fails.append(("crash coherence", spec.kind, trial))

    # checkers without generators: subset closure on executions that pass on the full interval
    adder_net, tmr_net = adder(1), adder_tmr(1)
    for trial in range(600):
        strat = AdversaryStrategy(rng.randrange(1 << 30), POLICIES[trial % 3])
        J = _rand_sub(rng, I10)
        k = trial % 3
        if k == 0:
            s = Signal(I10, 0, (_rand_time(rng, I10.lo, I10.hi),)) if rng.random() < 0.8 else _rand_signal(rng, I10, 2)
            base = bool(wm_spec_check(s, I10))
            sub = bool(wm_spec_check(s, J))
        elif k == 1:
            ins = adder_scenario()(trial, rng, I10)
            E = simulate(adder_net, ins, I10, strat)
            ext = E.select(["A0", "B0", "Y0", "Y1"])
            base, sub = bool(AdderSpec(1).check(ext, I10)), bool(AdderSpec(1).check(ext, J))
        else:
            ins = tmr_scenario()(trial, rng, I10)
            E = simulate(tmr_net, ins, I10, strat)
            ext = E.select(list(tmr_net.inputs) + list(tmr_net.outputs))
            base, sub = bool(TMRAdderSpec(1).check(ext, I10)), bool(TMRAdderSpec(1).check(ext, J))
        if base:
            counts["subset"] += 1
            if not sub:
                fails.append(("subset", ("wm", "adder", "adder_tmr")[k], trial, str(J)))

    for trial in range(2500):
        s = _rand_signal(rng, I10, 8)
        J = _rand_sub(rng, I10)
        K = _rand_sub(rng, J)
        counts["restriction"] += 1
        rJ = restrict(s, J)
        if restrict(rJ, J) != rJ or restrict(rJ, K) != restrict(s, K):
            fails.append(("restriction", trial))

    names = sorted(EXAMPLES)
    for trial in range(1200):
        n = EXAMPLES[names[trial % len(names)]]()
        I = Interval(Time(0), Time(12))
        seed = rng.randrange(1 << 30)
        ins = random_inputs(n.inputs, I, random.Random(seed))
        init = random_init(n, random.Random(seed), I.lo)
        runs = [csv_text(simulate(n, ins, I, AdversaryStrategy(seed, POLICIES[trial % 3]), init=init))
                for _ in range(2)]
        counts["rerun"] += 1
        if runs[0] != runs[1]:
            fails.append(("rerun", n.name, trial))

    total = sum(counts.values())
    return total >= 10_000 and not fails, f"{total} cases {counts}, failures {fails[:5]}"


CRITERIA = [
    (1, "oscillator trace on [0,4]", 1, c1),
    (2, "channel fault never recovered", 5, c2),
    (3, "Mem oscillator stabilizes by T+2d", 60, c3),
    (4, "faulty Mem oscillator, delta 3/10 from 6.3", None, c4),
    (5, "d > T counterexample", 120, c5),
    (6, "adder fault tolerance", 60, c6),
    (7, "forgetfulness bound and sampled test", None, c7),
    (8, "eSPF settling", 30, c8),
    (9, "eSPF' single rise and WM covering", 30, c9),
    (10, "framework property fuzz", 120, c10),
]


@pytest.mark.parametrize("num, title, limit, body", CRITERIA, ids=[f"criterion{c[0]}" for c in CRITERIA])
def test_criterion(num, title, limit, body):
    ok, line = run_criterion(num, title, limit, body)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(*c)[0] for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
