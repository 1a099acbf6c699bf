"""Example circuits: oscillators, adders, the Mem oscillator and the eSPF loop."""

from __future__ import annotations

from .basic import ChannelSpec, GateSpec, MemSpec, SourceSpec
from .netlist import Netlist
from .timebase import SQRT2, Time, as_time


def oscillator(d=1) -> Netlist:
    """Resettable oscillator: Y = EN and not Y(t - d)."""
    mods = {
        "Chn": ChannelSpec("pure", d, name="Chn"),
        "Inv": GateSpec("NOT", name="Inv"),
        "And": GateSpec("AND", name="And"),
    }
    wires = [
        ("EN", "And.in0"),
        ("Inv.out", "And.in1"),
        ("Chn.out", "Inv.in"),
        ("And.out", "Chn.in"),
        ("And.out", "Y"),
    ]
    return Netlist("oscillator", ["EN"], ["Y"], mods, wires)


def adder(d=1) -> Netlist:
    """1-bit adder from three zero-time adders, input channels of maximal
    delay ``d`` and a zero-time majority voter on the outputs."""
    mods = {}
    wires = []
    for k in (1, 2, 3):
        mods[f"CA{k}"] = ChannelSpec("bounded", d, name=f"CA{k}")
        mods[f"CB{k}"] = ChannelSpec("bounded", d, name=f"CB{k}")
        mods[f"Add{k}"] = GateSpec("ADD1", name=f"Add{k}")
        wires += [
            ("A0", f"CA{k}.in"),
            ("B0", f"CB{k}.in"),
            (f"CA{k}.out", f"Add{k}.a"),
            (f"CB{k}.out", f"Add{k}.b"),
        ]
    mods["Vote"] = GateSpec("MAJ3", width=2, name="Vote")
    for k, x in zip((1, 2, 3), "abc"):
        wires += [(f"Add{k}.sum", f"Vote.{x}0"), (f"Add{k}.carry", f"Vote.{x}1")]
    wires += [("Vote.out0", "Y0"), ("Vote.out1", "Y1")]
    return Netlist("adder", ["A0", "B0"], ["Y0", "Y1"], mods, wires)


def adder_sites(n: Netlist | None = None) -> dict:
    """Fault sites of the adder: each adder with its two input channels, and the voter."""
    sites = {f"Add{k}": (f"Add{k}", f"CA{k}", f"CB{k}") for k in (1, 2, 3)}
    sites["Vote"] = ("Vote",)
    return sites


def adder_tmr(d=1) -> Netlist:
    """Triple-modular-redundant adder.

    Inputs and outputs are triplicated; three voters at the adder inputs vote
    on the replicated (channel-delayed) input pairs.  The exact wiring is a
    design choice.
    """
    mods = {}
    wires = []
    for k in (1, 2, 3):
        mods[f"CA{k}"] = ChannelSpec("bounded", d, name=f"CA{k}")
        mods[f"CB{k}"] = ChannelSpec("bounded", d, name=f"CB{k}")
        wires += [(f"A0_{k}", f"CA{k}.in"), (f"B0_{k}", f"CB{k}.in")]
    for k in (1, 2, 3):
        mods[f"V{k}"] = GateSpec("MAJ3", width=2, name=f"V{k}")
        for j, x in zip((1, 2, 3), "abc"):
            wires += [(f"CA{j}.out", f"V{k}.{x}0"), (f"CB{j}.out", f"V{k}.{x}1")]
        mods[f"Add{k}"] = GateSpec("ADD1", name=f"Add{k}")
        wires += [
            (f"V{k}.out0", f"Add{k}.a"),
            (f"V{k}.out1", f"Add{k}.b"),
            (f"Add{k}.sum", f"Y0_{k}"),
            (f"Add{k}.carry", f"Y1_{k}"),
        ]
    ins = [f"{x}0_{k}" for x in "AB" for k in (1, 2, 3)]
    outs = [f"Y{j}_{k}" for j in (0, 1) for k in (1, 2, 3)]
    return Netlist("adder_tmr", ins, outs, mods, wires,
                   notes="three adders, each fed by its own voter over the three replicated input pairs")


def mem_osc(T=Time(3) / 2, d=1) -> Netlist:
    """Self-stabilizing oscillator: Mem, a pure delay channel and an inverter."""
    mods = {
        "Mem": MemSpec(T, name="Mem"),
        "Chn": ChannelSpec("pure", d, name="Chn"),
        "Inv": GateSpec("NOT", name="Inv"),
    }
    wires = [
        ("Mem.Y", "Chn.in"),
        ("Chn.out", "Inv.in"),
        ("Inv.out", "Mem.X"),
        ("Mem.Y", "Y"),
    ]
    return Netlist("mem_osc", [], ["Y"], mods, wires)


def espf() -> Netlist:
    """OR fed by the input and by its own output through delays 1 and sqrt2.

    The OR has three inputs (the external input plus two feedback taps); this
    is equivalent to two chained two-input ORs.
    """
    mods = {
        "Or": GateSpec("OR", arity=3, name="Or"),
        "C1": ChannelSpec("pure", 1, name="C1"),
        "C2": ChannelSpec("pure", SQRT2, name="C2"),
    }
    wires = [
        ("in", "Or.in0"),
        ("C1.out", "Or.in1"),
        ("C2.out", "Or.in2"),
        ("Or.out", "C1.in"),
        ("Or.out", "C2.in"),
        ("Or.out", "out"),
    ]
    return Netlist("espf", ["in"], ["out"], mods, wires)


def wm(wmin=Time(1) / 10, wmax=1, filter_delay=1) -> Netlist:
    """Random single-pulse source feeding the eSPF loop and an inertial filter
    of threshold 1, giving an output that rises exactly once."""
    mods = {
        "Gen": SourceSpec("random-pulse", t0=0, wmin=as_time(wmin), wmax=as_time(wmax), name="Gen"),
        "Or": GateSpec("OR", arity=3, name="Or"),
        "C1": ChannelSpec("pure", 1, name="C1"),
        "C2": ChannelSpec("pure", SQRT2, name="C2"),
        "Filt": ChannelSpec("inertial", filter_delay, threshold=1, name="Filt"),
    }
    wires = [
        ("Gen.out", "Or.in0"),
        ("C1.out", "Or.in1"),
        ("C2.out", "Or.in2"),
        ("Or.out", "C1.in"),
        ("Or.out", "C2.in"),
        ("Or.out", "Filt.in"),
        ("Filt.out", "out"),
    ]
    return Netlist("wm", [], ["out"], mods, wires)


def zero_loop() -> Netlist:
    """Two zero-time inverters in a loop (not simulatable)."""
    mods = {"G1": GateSpec("NOT", name="G1"), "G2": GateSpec("NOT", name="G2")}
    wires = [("G1.out", "G2.in"), ("G2.out", "G1.in"), ("G2.out", "Y")]
    return Netlist("zero_loop", [], ["Y"], mods, wires)


EXAMPLES = {
    "oscillator": oscillator,
    "adder": adder,
    "adder_tmr": adder_tmr,
    "mem_osc": mem_osc,
    "espf": espf,
    "wm": wm,
}
