from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tcircuits import AdversaryStrategy, Execution, FaultPlan, Interval, Netlist, Signal, Time, check_feasible, \
    graph_analysis, simulate, validate
from tcircuits.basic import ChannelInit, ChannelSpec, GateSpec, MemInit
from tcircuits.faults import random_inputs
from tcircuits.library import EXAMPLES, adder, espf, mem_osc, oscillator, zero_loop
from tcircuits.repro import FIG2_FAULT, FIG6_FAULT
from tcircuits.simulate import BudgetExceeded, MissingPortError, SimulationError
from tcircuits.stabilization import random_init

I10 = Interval(Time(0), Time(10))


def T(x):
    return Time(Fraction(x))


def test_validate_examples():
    assert validate(oscillator()) == []
    n = oscillator()
    n.wires = [w for w in n.wires if w[1] != "And.in0"]
    v = validate(n)
    assert [x.port for x in v] == ["And.in0"]
    n = oscillator()
    n.wires.append(("EN", "Inv.in"))
    v = validate(n)
    assert any(x.port == "Inv.in" and "driven by 2" in x.message for x in v)


def test_validate_unknown_endpoints():
    n = oscillator()
    n.wires.append(("Ghost.out", "Y2"))
    ports = {x.port for x in validate(n)}
    assert {"Ghost.out", "Y2"} <= ports


def test_graph_examples():
    assert graph_analysis(adder()).acyclic
    g = graph_analysis(oscillator())
    assert g.cycles == [["And", "Chn", "Inv"]] and g.every_cycle_delayed
    z = graph_analysis(zero_loop())
    assert not z.acyclic and not z.every_cycle_delayed


def test_mem_alone_does_not_break_a_cycle():
    from tcircuits.basic import MemSpec
    n = Netlist("m", [], ["Y"], {"M": MemSpec(1, name="M"), "G": GateSpec("NOT", name="G")},
                [("M.Y", "G.in"), ("G.out", "M.X"), ("M.Y", "Y")])
    assert not graph_analysis(n).every_cycle_delayed
    with pytest.raises(SimulationError):
        simulate(n, {}, I10)


def test_bounded_channel_delays_only_with_positive_minimum():
    n = Netlist("b", [], ["Y"], {"C": ChannelSpec("bounded", 1, name="C"), "G": GateSpec("NOT", name="G")},
                [("C.out", "G.in"), ("G.out", "C.in"), ("G.out", "Y")])
    assert not graph_analysis(n).every_cycle_delayed
    assert graph_analysis(n, AdversaryStrategy(min_delay=T("1/2"))).every_cycle_delayed


def test_oscillator_trace():
    I = Interval(Time(0), Time(4))
    E = simulate(oscillator(1), {"EN": Signal(I, 1, ())}, I)
    y = E["Y"]
    assert y.transitions == tuple(Time(k) for k in (1, 2, 3, 4))
    for t in y.transitions:
        assert y.value_at(t) == 1 - y.value_at(t - 1)


def test_adder_outputs_sum_after_d():
    for a in (0, 1):
        for b in (0, 1):
            ins = {"A0": Signal(I10, a, ()), "B0": Signal(I10, b, ())}
            for seed in range(5):
                E = simulate(adder(1), ins, I10, AdversaryStrategy(seed), init=random_init(adder(1),
                             AdversaryStrategy(seed).rng("i"), Time(0)))
                s = a + b
                after = Interval(Time(1), Time(10))
                assert E["Y0"].restrict(after).transitions == () and E["Y0"].value_at(Time(1)) == s & 1
                assert E["Y1"].restrict(after).transitions == () and E["Y1"].value_at(Time(1)) == s >> 1


def test_passthrough_wire():
    n = Netlist("wire", ["a"], ["b"], {}, [("a", "b")])
    x = Signal(I10, 0, (Time(2), Time(3)))
    assert simulate(n, {"a": x}, I10)["b"] == x


def test_zero_delay_cycle_rejected_with_cycle():
    with pytest.raises(SimulationError, match="G1"):
        simulate(zero_loop(), {}, I10)


def test_budget_exceeded_names_port():
    with pytest.raises(BudgetExceeded, match=r"\."):
        simulate(espf(), {"in": Signal(I10, 1, (T("1/64"),))}, I10, budget=50)


def test_input_domain_must_cover():
    with pytest.raises(SimulationError, match="EN"):
        simulate(oscillator(), {"EN": Signal(Interval(Time(0), Time(2)), 1, ())}, I10)


def _fig2():
    I = Interval(Time(-1), Time(12))
    return simulate(oscillator(1), {"EN": Signal(I, 0, (Time(0),))}, I,
                    faults=FaultPlan(overrides={"Chn.out": FIG2_FAULT}))


def test_check_feasible_fig2_fault_window():
    E = _fig2()
    rep = check_feasible(oscillator(1), E, Interval(Time(5), Time(6)))
    assert rep.failing() == ["Chn"]
    assert rep.verdicts["And"] and rep.verdicts["Inv"]
    assert check_feasible(oscillator(1), E, Interval(Time(0), Time(4))).feasible


def test_check_feasible_fig6_windows():
    n = mem_osc()
    E = simulate(n, {}, I10, faults=FaultPlan(overrides={"Chn.out": FIG6_FAULT}))
    assert check_feasible(n, E, Interval(Time(5), Time(6))).failing() == ["Chn"]
    assert check_feasible(n, E, Interval(T("63/10"), Time(10))).feasible


def test_missing_internal_port():
    E = simulate(oscillator(1), {"EN": Signal(I10, 1, ())}, I10)
    partial = E.select(["EN", "Y"])
    with pytest.raises(MissingPortError):
        check_feasible(oscillator(1), partial)


def test_netlist_json_roundtrip(tmp_path):
    for name, make in EXAMPLES.items():
        n = make()
        p = tmp_path / f"{name}.json"
        n.save(p)
        m = Netlist.load(p)
        assert m.dumps() == n.dumps()


SIMULATABLE = ["oscillator", "adder", "adder_tmr", "mem_osc", "espf"]


@given(st.sampled_from(SIMULATABLE), st.integers(0, 10 ** 6), st.sampled_from(["minimal", "maximal", "uniform"]),
       st.booleans())
def test_simulated_runs_are_feasible_and_deterministic(name, seed, policy, adversarial):
    n = EXAMPLES[name]()
    strat = AdversaryStrategy(seed, policy)
    rng = strat.rng("test")
    I = Interval(Time(0), Time(8))
    ins = random_inputs(n.inputs, I, rng)
    if name == "espf":
        ins = {"in": Signal(I, 1, (T("1/2"),))}
    init = random_init(n, rng, I.lo) if adversarial else None
    E = simulate(n, ins, I, strat, init=init)
    assert check_feasible(n, E).feasible
    assert simulate(n, ins, I, strat, init=init).same_as(E)


def test_quiescent_init_values():
    E = simulate(mem_osc(), {}, I10, init={"Chn": ChannelInit(0), "Mem": MemInit(None)})
    assert E["Y"].init == 1  # the inverter sees 0, triggers Mem at once
