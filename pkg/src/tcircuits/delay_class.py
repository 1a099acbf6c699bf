"""Delay classes: compositional BD bounds, eSPF settling, eSPF' and WM."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .basic import ChannelSpec, GateSpec, channel_check, inertial_filter, wm_spec_check
from .basic.channel import ChannelParams
from .library import espf, wm
from .netlist import Netlist, NotApplicable, longest_weighted_path
from .signals import Execution, Signal, constant, limit_of_covering
from .simulate import simulate
from .strategy import AdversaryStrategy
from .timebase import SQRT2, ZERO, Interval, Time, as_time

# -- bounded delay -------------------------------------------------------------------


@dataclass
class DelayClassDecl:
    """Per-submodule class: ``("BD", bound)``, ``("FD", None)`` or None (undeclared)."""

    classes: dict = field(default_factory=dict)

    def __post_init__(self):
        norm = {}
        for k, v in self.classes.items():
            if v is None:
                norm[k] = None
                continue
            if isinstance(v, str):
                kind, _, b = v.partition(":")
                v = (kind.strip().upper(), b.strip() or None)
            kind, b = v
            if kind not in ("BD", "FD"):
                raise ValueError(f"{k}: delay class must be BD or FD, got {kind!r}")
            if kind == "BD":
                if b is None:
                    raise ValueError(f"{k}: BD needs a bound")
                b = as_time(b)
                if b < ZERO:
                    raise ValueError(f"{k}: delay bound must be >= 0, got {b}")
            norm[k] = (kind, b if kind == "BD" else None)
        self.classes = norm

    @classmethod
    def derive(cls, n: Netlist) -> "DelayClassDecl":
        """Channels are BD with their delay bound, zero-time gates BD with 0."""
        out = {}
        for i, m in n.modules.items():
            if isinstance(m, ChannelSpec):
                out[i] = ("BD", m.d)
            elif isinstance(m, GateSpec):
                out[i] = ("BD", ZERO)
            else:
                out[i] = None
        return cls(out)

    @classmethod
    def load(cls, path, n: Netlist | None = None) -> "DelayClassDecl":
        doc = json.loads(Path(path).read_text())
        base = cls.derive(n).classes if n is not None else {}
        base.update(doc.get("delay_class", doc))
        return cls(base)

    def to_dict(self) -> dict:
        return {k: None if v is None else (v[0] if v[1] is None else f"{v[0]}:{v[1]}")
                for k, v in sorted(self.classes.items())}


def bd_bound(n: Netlist, decl: DelayClassDecl | Mapping | None = None) -> Time:
    """Longest path weighted by the declared delay bounds.

    Raises :class:`NotApplicable` for cyclic circuit graphs and for submodules
    that are only finite-delay or undeclared.
    """
    if decl is None:
        decl = DelayClassDecl.derive(n)
    elif not isinstance(decl, DelayClassDecl):
        decl = DelayClassDecl(dict(decl))
    fd = sorted(i for i, c in decl.classes.items() if c is not None and c[0] == "FD" and i in n.modules)
    weights = {i: (c[1] if c is not None and c[0] == "BD" else None) for i, c in decl.classes.items()}
    if fd:
        longest_weighted_path(n, {i: ZERO for i in n.modules})  # a cycle takes precedence
        raise NotApplicable(f"submodule(s) {', '.join(fd)} are finite-delay without a bound")
    return longest_weighted_path(n, weights)


# -- eSPF --------------------------------------------------------------------------------

def pulse_starts(horizon) -> list:
    """All ``n + m*sqrt2 <= horizon`` with ``n, m >= 0``, sorted."""
    H = as_time(horizon)
    out = []
    m = 0
    while m * SQRT2 <= H:
        base = m * SQRT2
        k = (H - base).floor()
        out.extend(base + j for j in range(k + 1))
        m += 1
    out.sort()
    return out


@dataclass
class SettlingResult:
    delta: Time
    horizon: Time
    settle: Time | None
    pulse_count: int
    max_gap: Time
    output: Signal

    @property
    def settled(self) -> bool:
        return self.settle is not None

    def row(self) -> dict:
        s = self.settle
        return {
            "delta_exact": str(self.delta),
            "delta_decimal": f"{float(self.delta):.12g}",
            "settle_exact": "not-settled" if s is None else str(s),
            "settle_decimal": "" if s is None else f"{float(s):.12g}",
            "pulse_count": self.pulse_count,
            "max_gap": str(self.max_gap),
        }

    def to_dict(self) -> dict:
        return {**self.row(), "horizon": str(self.horizon),
                "max_gap_decimal": f"{float(self.max_gap):.12g}"}


def espf_settling(delta, horizon=200) -> SettlingResult:
    """Output of the eSPF loop for the input pulse ``[0, delta)``.

    The output is the union of ``[s, s + delta)`` over the pulse starts
    ``s = n + m*sqrt2``.  ``settle`` is the end of the last gap in
    ``[0, horizon]`` (0 without gaps), or None when the output is 0 at the
    horizon or only rises there.  ``max_gap`` is the longest stretch of 0 in ``[0, horizon]``.
    """
    D, H = as_time(delta), as_time(horizon)
    if D <= ZERO:
        raise ValueError("delta must be > 0")
    if H <= ZERO:
        raise ValueError("horizon must be > 0")
    starts = pulse_starts(H)
    dom = Interval(ZERO, H)
    trans = []
    end = starts[0] + D
    last_gap_end = ZERO
    max_gap = ZERO
    for s in starts[1:]:
        if s <= end:
            if s + D > end:
                end = s + D
            continue
        trans += [end, s]
        if s - end > max_gap:
            max_gap = s - end
        last_gap_end = s
        end = s + D
    settle = last_gap_end
    if settle == H:
        settle = None  # the last gap closes only at the horizon itself
    if end < H:
        trans.append(end)
        if H - end > max_gap:
            max_gap = H - end
        settle = None
    out = Signal(dom, 1, tuple(t for t in trans if t <= H))
    return SettlingResult(D, H, settle, len(starts), max_gap, out)


def espf_simulated(delta, horizon=30) -> Signal:
    """The same output from the generic simulator on the eSPF netlist."""
    D, H = as_time(delta), as_time(horizon)
    dom = Interval(ZERO, H)
    pulse = Signal(dom, 1, (D,) if D <= H else ())
    return simulate(espf(), {"in": pulse}, dom)["out"]


def settling_sweep(deltas, horizon=200) -> list:
    return [espf_settling(d, horizon) for d in deltas]


@dataclass
class EspfPrimeResult:
    delta: Time
    horizon: Time
    output: Signal
    settled: bool

    @property
    def rising_edges(self) -> tuple:
        return self.output.rising_edges()

    @property
    def conclusive(self) -> bool:
        return self.settled

    def to_dict(self) -> dict:
        return {
            "delta": str(self.delta),
            "horizon": str(self.horizon),
            "transitions": [str(t) for t in self.output.transitions],
            "rising_edges": [str(t) for t in self.rising_edges],
            "exactly_one_rise": len(self.output.transitions) == 1 and len(self.rising_edges) == 1,
            "settled": self.settled,
            **({} if self.settled else {"flag": "inconclusive: eSPF not settled within the horizon"}),
        }


def espf_prime(delta, horizon=200, threshold=1) -> EspfPrimeResult:
    """eSPF output through a zero-delay inertial filter of the given threshold.

    Observed from ``-1`` so that the first rise at 0 is a transition.
    """
    res = espf_settling(delta, horizon)
    H = res.horizon
    ts = [ZERO, *res.output.transitions]
    kept = inertial_filter(ts, as_time(threshold))
    # a pulse cut by the horizon may still be cancelled later; keep it visible
    out = Signal(Interval(Time(-1), H), 0, tuple(kept))
    return EspfPrimeResult(res.delta, H, out, res.settled)


# -- WM ------------------------------------------------------------------------------

def wm_run(seed: int = 0, horizon=200, wmin=Time(1) / 10, wmax=1) -> Execution:
    n = wm(wmin, wmax)
    return simulate(n, {}, Interval(Time(-1), as_time(horizon)), AdversaryStrategy(seed))


def wm_demo(seed: int = 0, i_max: int = 100, horizon=200, wmin=Time(1) / 10, wmax=1) -> dict:
    """WM built from a random pulse and eSPF'; its all-zero covering and limit."""
    if i_max < 1:
        raise ValueError("i_max must be >= 1")
    E = wm_run(seed, horizon, wmin, wmax)
    out = E["out"]
    width = E["Gen.out"].transitions[1] - E["Gen.out"].transitions[0] if len(E["Gen.out"].transitions) > 1 else None
    gen_v = wm_spec_check(out, E.interval)
    run = {
        "seed": seed,
        "horizon": str(E.interval.hi),
        "pulse_width": None if width is None else str(width),
        "pulse_width_range": [str(as_time(wmin)), str(as_time(wmax))],
        "out_transitions": [str(t) for t in out.transitions],
        "rising_edges": len(out.rising_edges()),
        "wm_feasible": bool(gen_v),
    }
    chain = [Execution(Interval(Time(-i), Time(i)), {"out": constant(0, Interval(Time(-i), Time(i)))})
             for i in range(1, i_max + 1)]
    prefix_ok = [bool(wm_spec_check(e["out"], e.interval)) for e in chain]
    limit = limit_of_covering(chain, closure="constant")
    lim_v = wm_spec_check(limit["out"], limit.interval)
    finite_infeasible = [i for i in range(1, i_max + 1)
                         if not wm_spec_check(limit["out"], Interval(Time(-i), Time(i)))]
    return {
        "generated_run": run,
        "covering": {
            "prefixes": i_max,
            "feasible_prefixes": sum(prefix_ok),
            "limit_interval": limit.interval.text(),
            "limit_feasible": bool(lim_v),
            "limit_reason": lim_v.reason,
            "limit_closed": all(prefix_ok) and bool(lim_v),
        },
        "finite_delay": {
            "finite_restrictions_checked": i_max,
            "infeasible_finite_restrictions": finite_infeasible,
            "witness_found": bool(finite_infeasible),
            "note": "the infeasible all-zero limit has no infeasible finite restriction among those checked",
        },
        "bounded_channel_contrast": channel_limit_demo(i_max),
    }


def channel_limit_demo(i_max: int = 20, d=1) -> dict:
    """A covering by feasible bounded-channel executions whose limit stays feasible
    on every finite window."""
    d = as_time(d)
    p = ChannelParams("bounded", d)
    half = d / 2
    chain = []
    for i in range(1, i_max + 1):
        # input high on [2j, 2j + 1) for every integer j, output the same shifted by d/2
        dom = Interval(Time(-i), Time(i))
        ins = tuple(Time(k) for k in range(-i + 1, i + 1))
        outs = tuple(t + half for t in (Time(k) for k in range(-i - 1, i + 1)) if -i < t + half <= i)
        chain.append(Execution(dom, {"in": Signal(dom, 1 - (i & 1), ins),
                                     "out": Signal(dom, _high_at(-i - half), outs)}))
    ok = [bool(channel_check(p, e["in"], e["out"], e.interval)) for e in chain]
    limit = limit_of_covering(chain)
    windows = [bool(channel_check(p, limit["in"], limit["out"], Interval(Time(-j), Time(j))))
               for j in range(1, i_max + 1)]
    return {"prefixes_feasible": sum(ok), "prefixes": i_max,
            "limit_windows_feasible": sum(windows), "windows": len(windows)}


def _high_at(t) -> int:
    return 1 if math.floor(t) % 2 == 0 else 0


def default_horizon(delta) -> Time:
    """A horizon of ``c / delta`` with c = 100, capped for sanity."""
    D = as_time(delta)
    return Time(min(max(20, math.ceil(100 / float(D))), 5000))


__all__ = [
    "DelayClassDecl", "EspfPrimeResult", "NotApplicable", "SettlingResult", "bd_bound", "channel_limit_demo",
    "espf_prime", "espf_settling", "espf_simulated", "pulse_starts", "settling_sweep", "wm_demo", "wm_run",
]
