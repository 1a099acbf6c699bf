from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import signals, subintervals
from tcircuits import AdderSpec, AdversaryStrategy, Execution, FaultPlan, Interval, OscSpec, Signal, \
    TMRAdderSpec, Time, check_f_tolerant, check_implements, simulate
from tcircuits.basic import ChannelSpec, GateSpec, InterfaceError, MemSpec
from tcircuits.faults import adder_scenario, byzantinize, crashify, tmr_scenario
from tcircuits.library import adder, adder_sites, adder_tmr, mem_osc, oscillator
from tcircuits.strategy import hostile_signal

I10 = Interval(Time(0), Time(10))


def T(x):
    return Time(Fraction(x))


def test_crashed_oscillator_holds_its_value():
    I = Interval(Time(0), Time(8))
    E = simulate(oscillator(1), {"EN": Signal(I, 1, ())}, I, faults=FaultPlan(crashes={"And": Time(2)}))
    y = E["Y"]
    assert y.restrict(Interval(Time(2), Time(8))).transitions == ()
    assert y.value_at(Time(5)) == y.value_at(Time(2))


def test_crash_before_and_after_interval():
    base = GateSpec("NOT", name="G")
    x = Signal(I10, 0, (Time(3), Time(6)))
    early = crashify(base, Time(-5)).generate({"in": x}, AdversaryStrategy(), I10)["out"]
    assert early.is_constant()
    late = crashify(base, Time(50)).generate({"in": x}, AdversaryStrategy(), I10)["out"]
    assert late == base.generate({"in": x}, AdversaryStrategy(), I10)["out"]


def test_byzantine_accepts_anything_and_replays():
    b = byzantinize(ChannelSpec("pure", 1, name="C"))
    E = Execution(I10, {"in": Signal(I10, 0, (Time(1),)), "out": Signal(I10, 1, (T("1/3"), T("1/2")))})
    assert b.check(E, I10)
    g1 = b.generate({}, AdversaryStrategy(5), I10)
    g2 = b.generate({}, AdversaryStrategy(5), I10)
    assert g1 == g2


@given(st.integers(0, 10 ** 6), st.sampled_from([1, 3, 10, Fraction(5, 2)]), st.integers(1, 12))
def test_hostile_signal_rate_cap(seed, rate, length):
    I = Interval(Time(0), Time(Fraction(length, 3)))
    s = hostile_signal(AdversaryStrategy(seed), "k", I, rate)
    cap = -(-Fraction(rate) * Fraction(length, 3) // 1)
    assert len(s.transitions) <= cap


def test_pure_channel_implements_bounded():
    r = check_implements(ChannelSpec("pure", 1), ChannelSpec("bounded", 2), trials=60)
    assert not r.refuted and r.verdict == "passed 60 trials"


def test_bounded_channel_does_not_implement_pure():
    r = check_implements(ChannelSpec("bounded", 2), ChannelSpec("pure", 1), trials=60)
    assert r.refuted and r.counterexample is not None


def test_mem_oscillator_implements_osc_from_clean_start():
    r = check_implements(mem_osc(), OscSpec(T("3/2"), 1), trials=12, interval=Interval(Time(0), Time(30)))
    assert not r.refuted


def test_interface_mismatch():
    with pytest.raises(InterfaceError):
        check_implements(oscillator(), OscSpec(1, 1), trials=1)


def test_adder_crashed_voter_refuted():
    r = check_f_tolerant(adder(1), AdderSpec(1), 1, "crash", trials=40, sites={"Vote": ("Vote",)},
                         inputs=adder_scenario(), crash_window=Interval(Time(0), T("1/2")))
    bad = r.failing()
    assert [x.fault_set for x in bad] == [("Vote",)]


def test_adder_tolerates_one_faulty_adder():
    sites = {k: v for k, v in adder_sites().items() if k != "Vote"}
    r = check_f_tolerant(adder(1), AdderSpec(1), 1, "byzantine", trials=40, sites=sites, inputs=adder_scenario())
    assert r.tolerant and len(r.results) == 4


def test_tmr_adder_tolerates_one_fault():
    r = check_f_tolerant(adder_tmr(1), TMRAdderSpec(1), 1, "byzantine", trials=8, inputs=tmr_scenario())
    assert r.tolerant and len(r.results) == 1 + len(adder_tmr().modules)


def test_f_larger_than_sites():
    with pytest.raises(ValueError):
        check_f_tolerant(adder(1), AdderSpec(1), 5, "crash", sites={"Vote": ("Vote",)})


def test_tolerance_is_downward_closed():
    sites = {"Add1": adder_sites()["Add1"], "Add2": adder_sites()["Add2"]}
    r2 = check_f_tolerant(adder(1), AdderSpec(1), 2, "byzantine", trials=12, sites=sites, inputs=adder_scenario())
    sets = [x.fault_set for x in r2.results]
    assert sets == [(), ("Add1",), ("Add2",), ("Add1", "Add2")]
    r1 = check_f_tolerant(adder(1), AdderSpec(1), 1, "byzantine", trials=12, sites=sites, inputs=adder_scenario())
    if r2.tolerant:
        assert r1.tolerant
    assert not r2.tolerant  # two faulty adders outvote the good one


_SPECS = [ChannelSpec("pure", 1, name="C"), ChannelSpec("bounded", T("1/2"), name="C"),
          GateSpec("NOT", name="G"), MemSpec(T("3/2"), name="M")]


@given(st.sampled_from(_SPECS), signals(irr=True), st.integers(0, 10 ** 6), st.data())
def test_fault_transforms_only_weaken(spec, x, seed, data):
    ins = {spec.inputs[0]: x}
    E = Execution(I10, {**ins, **spec.generate(ins, AdversaryStrategy(seed), I10)})
    J = data.draw(subintervals(I10))
    assert spec.check(E, J)
    assert crashify(spec, data.draw(st.integers(0, 10))).check(E, J)
    assert byzantinize(spec).check(E, J)
    # arbitrary outputs: whatever the healthy checker accepts, the faulty ones accept too
    y = data.draw(signals(irr=True))
    F = Execution(I10, {**ins, spec.outputs[0]: y})
    if spec.check(F, J):
        assert crashify(spec).check(F, J)


@given(st.sampled_from(_SPECS), signals(), st.integers(0, 10 ** 6))
def test_crashed_generation_is_checked_crash(spec, x, seed):
    ins = {spec.inputs[0]: x}
    t = Time(seed % 11)
    c = crashify(spec, t)
    E = Execution(I10, {**ins, **c.generate(ins, AdversaryStrategy(seed), I10)})
    assert c.check(E, I10)
    late = crashify(spec, Time(11)).generate(ins, AdversaryStrategy(seed), I10)
    later = crashify(spec, Time(1000)).generate(ins, AdversaryStrategy(seed), I10)
    assert late == later
