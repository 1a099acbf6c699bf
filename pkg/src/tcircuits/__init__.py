"""Timed binary circuits as interval-checked module specifications.

Exact times live in ``Q[sqrt2]``; signals are right-continuous binary
functions with finitely many transitions; modules pair an interval checker
with an optional generator driven by a replayable adversary.
"""

from .basic import (AdderSpec, ChannelInit, ChannelSpec, EnabledOscSpec, GateSpec, MemInit, MemSpec, ModuleSpec,
                    OscSpec, SourceSpec, TMRAdderSpec, Verdict, WMSpec, make_module, osc_spec_check, wm_spec_check)
from .faults import ByzantineSpec, CrashedSpec, check_f_tolerant, check_implements
from .netlist import Netlist, NotApplicable, graph_analysis, validate
from .signals import Execution, Signal, limit_of_covering
from .simulate import FaultPlan, check_feasible, simulate
from .strategy import AdversaryStrategy
from .timebase import INF, NEG_INF, SQRT2, Interval, Time, parse_time

__version__ = "0.1.0"

__all__ = [
    "AdderSpec", "AdversaryStrategy", "ByzantineSpec", "ChannelInit", "ChannelSpec", "CrashedSpec",
    "EnabledOscSpec", "Execution", "FaultPlan", "GateSpec", "INF", "Interval", "MemInit", "MemSpec", "ModuleSpec",
    "NEG_INF", "Netlist", "NotApplicable", "OscSpec", "SQRT2", "Signal", "SourceSpec", "TMRAdderSpec", "Time",
    "Verdict", "WMSpec", "check_f_tolerant", "check_feasible", "check_implements", "graph_analysis",
    "limit_of_covering", "make_module", "osc_spec_check", "parse_time", "simulate", "validate", "wm_spec_check",
]
