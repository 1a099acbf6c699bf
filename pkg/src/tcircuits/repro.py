"""Canned experiments with pinned seeds, compared against stored golden summaries."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

from .basic import AdderSpec, EnabledOscSpec, OscSpec, TMRAdderSpec, osc_spec_check
from .delay_class import espf_prime, espf_settling, espf_simulated, wm_demo, wm_run
from .faults import adder_scenario, check_f_tolerant, tmr_scenario
from .library import adder, adder_sites, adder_tmr, mem_osc, oscillator
from .plotting import plot_execution, plot_settling
from .signals import Execution, Signal
from .simulate import FaultPlan, check_feasible, simulate
from .stabilization import check_stabilizing, find_counterexample_d_gt_T, verify_mem_osc_lemma
from .traceio import write_csv, write_gnuplot
from .timebase import Interval, Time

SCHEMA_VERSION = 1


@dataclass
class ReproResult:
    name: str
    summary: dict
    checks: dict
    artifacts: list = field(default_factory=list)
    golden: str = "missing"

    @property
    def passed(self) -> bool:
        return all(self.checks.values()) and self.golden in ("match", "regenerated")

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "target": self.name,
            "passed": self.passed,
            "checks": self.checks,
            "golden": self.golden,
            "artifacts": [str(a) for a in self.artifacts],
            "summary": self.summary,
        }


def _times(ts) -> list:
    return [str(t) for t in ts]


def _emit(out: Path, stem: str, E: Execution, ports, title: str, faults=(), marks=()) -> list:
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / f"{stem}.csv", out / f"{stem}.dat", out / f"{stem}.png"]
    write_csv(paths[0], E, ports)
    write_gnuplot(paths[1], E, ports)
    plot_execution(E, paths[2], ports, title, faults, marks)
    return paths


def _T(x) -> Time:
    return Time(x) if not isinstance(x, str) else Time.parse(x)


# -- targets ---------------------------------------------------------------------

def _oscillator(out: Path) -> ReproResult:
    n = oscillator(1)
    I = Interval(Time(-1), Time(8))
    E = simulate(n, {"EN": Signal(I, 0, (Time(0),))}, I)
    short = Interval(Time(0), Time(4))
    E4 = simulate(n, {"EN": Signal(short, 1, ())}, short)
    y4 = E4["Y"]
    inverse = all(y4.value_at(t) == 1 - y4.value_at(t - 1) for t in y4.transitions if t - 1 >= short.lo)
    rep = check_feasible(n, E)
    summary = {"Y_init": E["Y"].init, "Y": _times(E["Y"].transitions), "Y_on_0_4": _times(y4.transitions)}
    checks = {
        "transitions_1_to_4": list(y4.transitions) == [Time(k) for k in (1, 2, 3, 4)],
        "Y_is_not_Y_delayed": inverse,
        "all_submodules_feasible": rep.feasible,
    }
    arts = _emit(out, "oscillator", E, ["EN", "Chn.out", "Y"], "oscillator, EN rises at 0")
    return ReproResult("oscillator", summary, checks, arts)


FIG2_FAULT = Signal(Interval(Time(5), Time(6)), 1,
                    (_T("36/7"), _T("37/7"), _T("39/7"), _T("40/7")))


def fig2_scenario(horizon: Interval):
    def make(trial, rng, I):
        return ({"EN": Signal(I, 1, ())}, {},
                FaultPlan(overrides={"Chn.out": FIG2_FAULT}))
    return make


def _fig2_fault(out: Path) -> ReproResult:
    n = oscillator(1)
    I = Interval(Time(-1), Time(12))
    plan = FaultPlan(overrides={"Chn.out": FIG2_FAULT})
    E = simulate(n, {"EN": Signal(I, 0, (Time(0),))}, I, faults=plan)
    win = Interval(Time(5), Time(6))
    rep = check_feasible(n, E, win)
    H = Interval(Time(0), Time(40))
    cuts = {}
    for c in range(1, 21):
        r = check_stabilizing(n, EnabledOscSpec(1), c, trials=1, horizon=H, scenario=fig2_scenario(H))
        cuts[str(c)] = r.passed
    summary = {
        "Y": _times(E["Y"].transitions),
        "failing_on_5_6": rep.failing(),
        "stabilizes_at_cut": cuts,
    }
    checks = {
        "channel_infeasible_on_5_6": rep.failing() == ["Chn"],
        "no_cut_recovers": not any(cuts.values()),
        "feasible_before_fault": check_feasible(n, E, Interval(Time(-1), Time(5))).feasible,
    }
    arts = _emit(out, "fig2_fault", E, ["EN", "Chn.out", "Y"], "oscillator with a channel fault on [5,6]",
                 faults=[("Chn.out", Time(5), Time(6))])
    return ReproResult("fig2-fault", summary, checks, arts)


def _adder_ft(out: Path) -> ReproResult:
    I = Interval(Time(0), Time(10))
    r = check_f_tolerant(adder(1), AdderSpec(1), 1, "byzantine", trials=100, sites=adder_sites(),
                         interval=I, inputs=adder_scenario(), seed=1)
    verdicts = {"+".join(x.fault_set) or "none": ("refuted" if x.refuted else "passed") for x in r.results}
    cx = next((x.counterexample for x in r.results if x.refuted), None)
    arts = []
    if cx is not None:
        arts = _emit(out, "adder_voter_counterexample", cx.execution,
                     ["A0", "B0", "Add1.sum", "Add2.sum", "Add3.sum", "Y0", "Y1"],
                     "adder with a Byzantine voter")
    summary = {"fault_sets": verdicts, "counterexample": None if cx is None else cx.to_dict()}
    checks = {
        "single_adder_faults_tolerated": all(verdicts[k] == "passed" for k in ("none", "Add1", "Add2", "Add3")),
        "voter_fault_refuted": verdicts["Vote"] == "refuted",
    }
    return ReproResult("adder-ft", summary, checks, arts)


def _tmr(out: Path) -> ReproResult:
    I = Interval(Time(0), Time(10))
    r = check_f_tolerant(adder_tmr(1), TMRAdderSpec(1), 1, "byzantine", trials=40, interval=I,
                         inputs=tmr_scenario(), seed=2)
    verdicts = {"+".join(x.fault_set) or "none": ("refuted" if x.refuted else "passed") for x in r.results}
    return ReproResult("tmr", {"fault_sets": verdicts, "trials_per_set": 40},
                       {"one_fault_tolerated": r.tolerant})


def _mem_osc(out: Path) -> ReproResult:
    T, d = Time(3) / 2, Time(1)
    lemma = verify_mem_osc_lemma(T, d, trials=1000, seed=1)
    stab = check_stabilizing(mem_osc(T, d), OscSpec(T, d), T + 2 * d, trials=200,
                             horizon=Interval(Time(0), Time(50)), seed=1)
    E = simulate(mem_osc(T, d), {}, Interval(Time(0), Time(12)))
    summary = {"lemma": lemma.to_dict(), "stabilize": {k: v for k, v in stab.to_dict().items() if k != "per_trial"},
               "quiescent_Y": _times(E["Y"].transitions)}
    checks = {
        "lemma_steps_hold": lemma.ok,
        "max_t0_within_T_plus_2d": lemma.max_t0 <= T + 2 * d,
        "stabilizes_at_cut": stab.passed,
        "worst_onset_within_cut": stab.worst_onset is not None and stab.worst_onset <= T + 2 * d,
    }
    arts = _emit(out, "mem_osc", E, ["Mem.X", "Mem.Y", "Chn.out"], "Mem oscillator, quiescent start")
    return ReproResult("mem-osc", summary, checks, arts)


FIG6_FAULT = Signal(Interval(Time(5), Time(6)), 1,
                    (_T("53/10"), _T("109/20"), _T("28/5"), _T("23/4")))


def _fig6_fault(out: Path) -> ReproResult:
    T, d = Time(3) / 2, Time(1)
    n = mem_osc(T, d)
    I = Interval(Time(0), Time(10))
    E = simulate(n, {}, I, faults=FaultPlan(overrides={"Chn.out": FIG6_FAULT}))
    start = _T("63/10")
    fit = osc_spec_check(E["Y"], T, d, Interval(start, I.hi))
    fault_rep = check_feasible(n, E, Interval(Time(5), Time(6)))
    tail_rep = check_feasible(n, E, Interval(start, I.hi))
    summary = {
        "Y": _times(E["Y"].transitions),
        "X": _times(E["Mem.X"].transitions),
        "failing_on_5_6": fault_rep.failing(),
        "delta": None if not fit else str(fit.detail["delta"]),
    }
    checks = {
        "channel_infeasible_on_5_6": fault_rep.failing() == ["Chn"],
        "osc_feasible_from_6.3": bool(fit),
        "delta_is_3/10": bool(fit) and fit.detail["delta"] == _T("3/10"),
        "all_feasible_from_6.3": tail_rep.feasible,
    }
    arts = _emit(out, "fig6_fault", E, ["Chn.out", "Mem.X", "Mem.Y"],
                 "Mem oscillator with a channel fault on [5,6]",
                 faults=[("Chn.out", Time(5), Time(6))], marks=[start])
    return ReproResult("fig6-fault", summary, checks, arts)


SWEEP = ("1/2", "1/4", "1/8", "1/16")


def _espf_sweep(out: Path) -> ReproResult:
    res = [espf_settling(x, 200) for x in SWEEP]
    settle = [r.settle for r in res]
    agree = {x: espf_settling(x, 30).output == espf_simulated(x, 30) for x in ("1/2", "1/4")}
    primes = {x: espf_prime(x, h).to_dict() for x, h in (("2", 50), ("1/2", 50), ("1/16", 300))}
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "espf_sweep.csv"
    _write_rows(csv_path, [r.row() for r in res])
    png = plot_settling(res, out / "espf_sweep.png")
    summary = {"sweep": [r.to_dict() for r in res], "engine_matches_simulator": agree,
               "espf_prime": primes}
    checks = {
        "T(1/2)=2": espf_settling("1/2", 20).settle == Time(2),
        "strictly_increasing": all(s is not None for s in settle)
        and all(a < b for a, b in zip(settle, settle[1:])),
        "engine_matches_simulator": all(agree.values()),
        "espf_prime_single_rise": all(p["exactly_one_rise"] for p in primes.values()),
    }
    return ReproResult("espf-sweep", summary, checks, [csv_path, png])


def _write_rows(path: Path, rows: list) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def _wm_demo(out: Path) -> ReproResult:
    rep = wm_demo(3, 100)
    E = wm_run(3)
    cov = rep["covering"]
    checks = {
        "generated_single_rise": rep["generated_run"]["rising_edges"] == 1 and rep["generated_run"]["wm_feasible"],
        "all_prefixes_feasible": cov["feasible_prefixes"] == 100,
        "limit_infeasible": not cov["limit_feasible"],
    }
    arts = _emit(out, "wm_run", E.restrict(Interval(Time(-1), Time(20))), ["Gen.out", "Or.out", "out"],
                 "WM run (seed 3)")
    return ReproResult("wm-demo", rep, checks, arts)


def _dgt_counterexample(out: Path) -> ReproResult:
    r = find_counterexample_d_gt_T(1, 2, 5000, horizon=50, seed=0)
    checks = {"found": r.found}
    arts = []
    if r.execution is not None:
        rep = check_feasible(mem_osc(1, 2), r.execution)
        checks["trace_is_correct_execution"] = rep.feasible
        arts = _emit(out, "dgtT_counterexample", r.execution.restrict(Interval(Time(0), Time(20))),
                     ["Mem.X", "Mem.Y", "Chn.out"], "Mem oscillator with d > T")
        summary = r.to_dict()
        summary["Y"] = summary["Y"][:40]
    else:
        summary = r.to_dict()
    return ReproResult("dgtT-counterexample", summary, checks, arts)


TARGETS: dict[str, Callable[[Path], ReproResult]] = {
    "oscillator": _oscillator,
    "fig2-fault": _fig2_fault,
    "adder-ft": _adder_ft,
    "tmr": _tmr,
    "mem-osc": _mem_osc,
    "fig6-fault": _fig6_fault,
    "espf-sweep": _espf_sweep,
    "wm-demo": _wm_demo,
    "dgtT-counterexample": _dgt_counterexample,
}


def golden_path(name: str, golden_dir=None) -> Path:
    if golden_dir is not None:
        return Path(golden_dir) / f"{name}.json"
    return Path(str(resources.files("tcircuits") / "data" / "golden" / f"{name}.json"))


def canonical(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def run(name: str, out_dir=".", regen: bool = False, golden_dir=None) -> ReproResult:
    if name not in TARGETS:
        raise KeyError(f"unknown repro target {name!r}; expected one of: {', '.join(TARGETS)}")
    res = TARGETS[name](Path(out_dir))
    doc = canonical({"target": name, "summary": res.summary, "checks": res.checks})
    gp = golden_path(name, golden_dir)
    if regen:
        gp.parent.mkdir(parents=True, exist_ok=True)
        gp.write_text(doc)
        res.golden = "regenerated"
    elif not gp.exists():
        res.golden = "missing"
    else:
        res.golden = "match" if gp.read_text() == doc else "differs"
    return res
