"""Command-line entry point.

Exit status: 0 all checks passed, 1 refutation or counterexample found,
2 usage or parse error, 3 event budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from importlib import resources
from pathlib import Path

from .basic import ConfigurationError, InterfaceError, make_module
from .delay_class import DelayClassDecl, bd_bound, espf_settling, wm_demo
from .faults import adder_scenario, check_f_tolerant, tmr_scenario
from .library import adder_sites
from .netlist import Netlist, NetlistError, NotApplicable, graph_analysis, validate
from .plotting import plot_execution, plot_settling
from .repro import SCHEMA_VERSION, TARGETS
from .repro import run as run_repro
from .simulate import DEFAULT_BUDGET, BudgetExceeded, SimulationError, check_feasible, simulate
from .stabilization import (ForgetfulnessDecl, HypothesisViolated, check_stabilizing, find_counterexample_d_gt_T,
                            forgetful_bound, test_forgetful)
from .strategy import POLICIES, AdversaryStrategy
from .timebase import Interval, parse_time
from .traceio import TraceFormatError, csv_text, read_input_dir, write_csv, write_gnuplot, write_signals

EXIT_OK, EXIT_REFUTED, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    """Bad flag values or unreadable files."""


# -- helpers -------------------------------------------------------------------------

def _time(flag: str, text: str):
    try:
        return parse_time(text)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _interval(flag: str, text: str) -> Interval:
    try:
        iv = Interval.parse(text)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None
    if not iv.bounded:
        raise UsageError(f"{flag}: interval must be bounded, got {text!r}")
    return iv


def _horizon(text: str) -> Interval:
    """Either ``lo..hi`` or a single end time (start 0)."""
    if ".." in text:
        return _interval("--horizon", text)
    return Interval(parse_time("0"), _time("--horizon", text))


def _load_netlist(path: str) -> Netlist:
    p = Path(path)
    if not p.exists():
        packaged = resources.files("tcircuits") / "data" / "netlists" / p.name
        if packaged.is_file():
            p = Path(str(packaged))
        else:
            raise UsageError(f"--netlist: file {path} not found")
    try:
        return Netlist.load(p)
    except NetlistError as exc:
        raise UsageError(f"--netlist {path}: {exc}") from None


def _spec(args, n: Netlist | None = None):
    params = {}
    if args.spec in ("osc",):
        params = {"T": args.T, "d": args.d}
    elif args.spec in ("enosc", "adder", "adder_tmr"):
        params = {"d": args.d}
    try:
        return make_module(args.spec, params)
    except ConfigurationError as exc:
        raise UsageError(f"--spec: {exc}") from None


def _emit(args, doc: dict, path: str | None = None):
    doc = {"schema_version": SCHEMA_VERSION, **doc}
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path:
        Path(path).write_text(text)
    if args.format == "json":
        sys.stdout.write(text)
    else:
        sys.stdout.write(_flat_csv(doc))


def _flat_csv(doc: dict) -> str:
    rows = []

    def walk(prefix, v):
        if isinstance(v, dict):
            for k in sorted(v):
                walk(f"{prefix}.{k}" if prefix else str(k), v[k])
        elif isinstance(v, list) and v and isinstance(v[0], (dict, list)):
            for i, x in enumerate(v):
                walk(f"{prefix}[{i}]", x)
        else:
            rows.append((prefix, json.dumps(v) if isinstance(v, list) else v))

    walk("", doc)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    w.writerows(rows)
    return buf.getvalue()


def _strategy(args) -> AdversaryStrategy:
    return AdversaryStrategy(args.seed, getattr(args, "policy", None) or POLICIES[0])


# -- subcommands --------------------------------------------------------------------

def cmd_validate(args) -> int:
    n = _load_netlist(args.netlist)
    problems = validate(n)
    doc = {"netlist": n.name, "valid": not problems, "violations": [str(v) for v in problems]}
    if not problems:
        g = graph_analysis(n, _strategy(args))
        doc["graph"] = {k: v for k, v in g.to_dict().items() if k not in ("nodes", "edges")}
    _emit(args, doc, args.report)
    if problems or not doc["graph"]["every_cycle_delayed"]:
        return EXIT_REFUTED
    return EXIT_OK


def cmd_simulate(args) -> int:
    n = _load_netlist(args.netlist)
    I = _horizon(args.horizon)
    inputs = {}
    if args.inputs:
        try:
            inputs = read_input_dir(args.inputs)
        except (TraceFormatError, FileNotFoundError) as exc:
            raise UsageError(f"--inputs: {exc}") from None
    for p in n.inputs:
        if p not in inputs:
            raise UsageError(f"--inputs: no signal for exported input port {p!r}")
    E = simulate(n, inputs, I, _strategy(args), budget=args.budget_events)
    ports = list(n.inputs) + sorted(p for p in E.ports if "." in p) + list(n.outputs)
    ports = list(dict.fromkeys(ports))
    if args.out:
        write_csv(args.out, E, ports)
    else:
        sys.stdout.write(csv_text(E, ports))
    if args.signals:
        write_signals(args.signals, {p: E[p] for p in ports})
    if args.gnuplot:
        write_gnuplot(args.gnuplot, E, ports)
    if args.plot:
        plot_execution(E, args.plot, list(n.inputs) + list(n.outputs), n.name)
    if args.check:
        rep = check_feasible(n, E)
        text = json.dumps({"schema_version": SCHEMA_VERSION, **rep.to_dict()}, indent=2, sort_keys=True) + "\n"
        if args.report:
            Path(args.report).write_text(text)
        sys.stderr.write(text)
        return EXIT_OK if rep.feasible else EXIT_REFUTED
    return EXIT_OK


def cmd_faults(args) -> int:
    n = _load_netlist(args.netlist)
    spec = _spec(args)
    I = _horizon(args.horizon)
    sites = None
    if args.sites == "adder":
        sites = adder_sites(n)
    scen = {"adder": adder_scenario(), "adder_tmr": tmr_scenario()}.get(args.spec)
    try:
        rep = check_f_tolerant(n, spec, args.f, args.type, trials=args.trials, sites=sites,
                               interval=I, inputs=scen, seed=args.seed)
    except InterfaceError as exc:
        raise UsageError(f"--spec: {exc}") from None
    doc = rep.to_dict()
    base = Path(args.report).with_suffix("") if args.report else None
    for r, entry in zip(rep.results, doc["fault_sets"]):
        if r.counterexample is not None and base is not None:
            tag = "+".join(r.fault_set) or "none"
            path = Path(f"{base}_cx_{tag}.csv")
            write_csv(path, r.counterexample.execution)
            entry["counterexample"]["trace"] = str(path)
    doc["netlist"] = n.name
    doc["spec"] = spec.kind
    _emit(args, doc, args.report)
    return EXIT_OK if rep.tolerant else EXIT_REFUTED


def cmd_stabilize(args) -> int:
    n = _load_netlist(args.netlist)
    spec = _spec(args)
    H = _horizon(args.horizon)
    cut = _time("--cut", args.cut)
    try:
        rep = check_stabilizing(n, spec, cut, trials=args.trials, horizon=H, seed=args.seed)
    except InterfaceError as exc:
        raise UsageError(f"--spec: {exc}") from None
    doc = rep.to_dict()
    if not args.per_trial:
        doc.pop("per_trial")
    doc["netlist"] = n.name
    _emit(args, doc, args.report)
    return EXIT_OK if rep.passed else EXIT_REFUTED


def cmd_forgetful(args) -> int:
    n = _load_netlist(args.netlist)
    try:
        decl = ForgetfulnessDecl.load(args.decl, n) if args.decl else ForgetfulnessDecl.derive(n)
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise UsageError(f"--decl: {exc}") from None
    doc = {"netlist": n.name, "declared": decl.to_dict()}
    status = EXIT_OK
    try:
        F = forgetful_bound(n, decl)
        doc["F"] = str(F)
    except NotApplicable as exc:
        doc["F"] = None
        doc["not_applicable"] = str(exc)
        F = None
    try:
        bdecl = DelayClassDecl.derive(n)
        doc["B"] = str(bd_bound(n, bdecl))
    except NotApplicable as exc:
        doc["B"] = None
        doc["B_not_applicable"] = str(exc)
    if args.test_trials and F is not None:
        F_test = _time("--test-F", args.test_F) if args.test_F else F
        res = test_forgetful(n, F_test, trials=args.test_trials, seed=args.seed)
        doc["test"] = res.to_dict()
        if res.refuted:
            status = EXIT_REFUTED
    _emit(args, doc, args.report)
    return status


def cmd_counterexample(args) -> int:
    T, d = _time("--T", args.T), _time("--d", args.d)
    r = find_counterexample_d_gt_T(T, d, args.budget, horizon=_time("--horizon", args.horizon), seed=args.seed)
    doc = r.to_dict()
    if r.execution is not None and args.out:
        write_csv(args.out, r.execution, ["Mem.X", "Mem.Y", "Chn.in", "Chn.out"])
        doc["trace"] = args.out
    _emit(args, doc, args.report)
    return EXIT_REFUTED if r.found else EXIT_OK


def cmd_espf(args) -> int:
    if args.delta_sweep:
        deltas = [x.strip() for x in args.delta_sweep.split(",") if x.strip()]
    elif args.delta:
        deltas = [args.delta]
    else:
        raise UsageError("espf: give --delta or --delta-sweep")
    H = _time("--horizon", args.horizon)
    results = []
    for x in deltas:
        D = _time("--delta", x)
        try:
            results.append(espf_settling(D, H))
        except ValueError as exc:
            raise UsageError(f"--delta {x}: {exc}") from None
    rows = [r.row() for r in results]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    if args.plot:
        plot_settling(results, args.plot)
    if args.format == "csv":
        sys.stdout.write(buf.getvalue())
    else:
        sys.stdout.write(json.dumps({"schema_version": SCHEMA_VERSION, "horizon": str(H),
                                     "results": [r.to_dict() for r in results]}, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if all(r.settled for r in results) else EXIT_REFUTED


def cmd_wm_demo(args) -> int:
    if args.imax < 1:
        raise UsageError("--imax must be >= 1")
    doc = wm_demo(args.seed, args.imax)
    _emit(args, doc, args.report)
    ok = doc["covering"]["feasible_prefixes"] == args.imax and not doc["covering"]["limit_feasible"]
    return EXIT_OK if ok else EXIT_REFUTED


def cmd_repro(args) -> int:
    if args.name not in TARGETS:
        raise UsageError(f"unknown repro target {args.name!r}; expected one of: {', '.join(TARGETS)}")
    res = run_repro(args.name, args.out_dir, regen=args.regen, golden_dir=args.golden_dir)
    doc = res.to_dict()
    doc.pop("schema_version")
    _emit(args, doc, args.report)
    return EXIT_OK if res.passed else EXIT_REFUTED


# -- parser -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--threads", type=int, default=1,
                        help="accepted for compatibility; trials run sequentially")
    common.add_argument("--budget-events", type=int, default=DEFAULT_BUDGET,
                        help="maximum number of event instants per simulation")
    common.add_argument("--format", choices=("json", "csv"), default="json", help="stdout report format")

    ap = argparse.ArgumentParser(prog="tcircuits", description="Timed circuit modules: simulate, check, reproduce.",
                                 parents=[common])
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_, parents=[common])
        p.set_defaults(func=fn)
        return p

    p = add("validate", cmd_validate, "check netlist well-formedness and feedback structure")
    p.add_argument("--netlist", required=True)
    p.add_argument("--report")

    p = add("simulate", cmd_simulate, "construct one execution and write its trace")
    p.add_argument("--netlist", required=True)
    p.add_argument("--inputs", help="signal file or directory of signal files")
    p.add_argument("--horizon", default="0..10", help="interval 'lo..hi' or an end time")
    p.add_argument("--policy", choices=POLICIES, default=POLICIES[0])
    p.add_argument("--out", help="CSV trace path (stdout if omitted)")
    p.add_argument("--signals", help="also write a bundled signal file")
    p.add_argument("--gnuplot", help="also write gnuplot step data")
    p.add_argument("--plot", help="also render a PNG of the exported ports")
    p.add_argument("--check", action="store_true", help="check every submodule on the trace")
    p.add_argument("--report", help="feasibility report path (with --check)")

    p = add("faults", cmd_faults, "sampled f-fault-tolerance check")
    p.add_argument("--netlist", required=True)
    p.add_argument("--spec", required=True, choices=("adder", "adder_tmr", "osc", "enosc", "wm"))
    p.add_argument("--T", default="1")
    p.add_argument("--d", default="1")
    p.add_argument("--f", type=int, default=1)
    p.add_argument("--type", choices=("crash", "byzantine"), default="byzantine")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--sites", choices=("each", "adder"), default="each",
                   help="fault sites: every submodule alone, or adder+input channels grouped")
    p.add_argument("--horizon", default="0..10")
    p.add_argument("--report")

    p = add("stabilize", cmd_stabilize, "check T-stabilization from adversarial initial states")
    p.add_argument("--netlist", required=True)
    p.add_argument("--spec", required=True, choices=("osc", "enosc", "adder", "adder_tmr", "wm"))
    p.add_argument("--T", default="1")
    p.add_argument("--d", default="1")
    p.add_argument("--cut", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--horizon", default="50")
    p.add_argument("--per-trial", action="store_true", help="include every trial in the report")
    p.add_argument("--report")

    p = add("forgetful", cmd_forgetful, "compositional forgetfulness and delay bounds")
    p.add_argument("--netlist", required=True)
    p.add_argument("--decl", help="JSON mapping submodule id to F_S (missing ids use defaults)")
    p.add_argument("--test-trials", type=int, default=0, help="also run the sampled forgetfulness test")
    p.add_argument("--test-F", help="F for the sampled test (default: the computed bound)")
    p.add_argument("--report")

    p = add("counterexample", cmd_counterexample, "search non-stabilizing Mem-oscillator runs (d > T)")
    p.add_argument("--T", default="1")
    p.add_argument("--d", default="2")
    p.add_argument("--budget", type=int, default=5000)
    p.add_argument("--horizon", default="50")
    p.add_argument("--out", help="CSV trace of the counterexample")
    p.add_argument("--report")

    p = add("espf", cmd_espf, "eSPF settling time")
    p.add_argument("--delta")
    p.add_argument("--delta-sweep")
    p.add_argument("--horizon", default="200")
    p.add_argument("--out", help="CSV path")
    p.add_argument("--plot", help="PNG of settling time against 1/delta")

    p = add("wm-demo", cmd_wm_demo, "WM construction and its non-limit-closed covering")
    p.add_argument("--imax", type=int, default=100)
    p.add_argument("--report")

    p = add("repro", cmd_repro, "run a canned experiment against its golden summary")
    p.add_argument("name", help=", ".join(TARGETS))
    p.add_argument("--out-dir", default="repro_out")
    p.add_argument("--regen", action="store_true", help="rewrite the golden summary")
    p.add_argument("--golden-dir", help="alternative golden directory")
    p.add_argument("--report")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (SimulationError, HypothesisViolated, ConfigurationError, TraceFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
