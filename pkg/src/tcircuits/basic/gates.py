"""Zero-time combinational gates."""

from __future__ import annotations

from typing import Mapping, Sequence

from ..signals import Execution, Signal, equal_on, first_difference, pointwise, restrict
from ..timebase import Interval
from .base import ConfigurationError, ModuleSpec, Verdict, check_ports

GATE_KINDS = ("AND", "OR", "NOT", "BUF", "XOR", "MAJ3", "ADD1")


def _maj(a, b, c):
    return (a & b) | (a & c) | (b & c)


def gate_ports(kind: str, arity: int = 2, width: int = 1):
    """Input and output port names of a gate."""
    if kind in ("NOT", "BUF"):
        return ("in",), ("out",)
    if kind in ("AND", "OR", "XOR"):
        if arity < 2:
            raise ConfigurationError(f"{kind} needs at least two inputs")
        return tuple(f"in{i}" for i in range(arity)), ("out",)
    if kind == "MAJ3":
        if width < 1:
            raise ConfigurationError("MAJ3 width must be at least 1")
        if width == 1:
            return ("a", "b", "c"), ("out",)
        ins = tuple(f"{x}{i}" for i in range(width) for x in "abc")
        return ins, tuple(f"out{i}" for i in range(width))
    if kind == "ADD1":
        return ("a", "b"), ("sum", "carry")
    raise ConfigurationError(f"unknown gate kind {kind!r}; expected one of {GATE_KINDS}")


def gate_functions(kind: str, arity: int = 2, width: int = 1) -> dict:
    """Map each output port to ``(function, input ports)``."""
    ins, outs = gate_ports(kind, arity, width)
    if kind == "NOT":
        return {"out": (lambda x: 1 - x, ins)}
    if kind == "BUF":
        return {"out": (lambda x: x, ins)}
    if kind == "AND":
        return {"out": (lambda *xs: int(all(xs)), ins)}
    if kind == "OR":
        return {"out": (lambda *xs: int(any(xs)), ins)}
    if kind == "XOR":
        return {"out": (lambda *xs: sum(xs) & 1, ins)}
    if kind == "MAJ3":
        if width == 1:
            return {"out": (_maj, ins)}
        return {f"out{i}": (_maj, (f"a{i}", f"b{i}", f"c{i}")) for i in range(width)}
    return {"sum": (lambda a, b: a ^ b, ins), "carry": (lambda a, b: a & b, ins)}


def gate_eval(kind: str, inputs: Mapping[str, Signal] | Sequence[Signal], arity: int | None = None,
              width: int = 1) -> dict:
    """Evaluate a gate pointwise.  ``inputs`` is a port map or a positional list."""
    if not isinstance(inputs, Mapping):
        seq = list(inputs)
        if arity is None:
            arity = len(seq)
        ins, _ = gate_ports(kind, arity, width)
        if len(ins) != len(seq):
            raise ConfigurationError(f"{kind} expects {len(ins)} inputs, got {len(seq)}")
        inputs = dict(zip(ins, seq))
    elif arity is None:
        arity = max(2, len(inputs))
    return {o: pointwise(fn, [inputs[p] for p in ps])
            for o, (fn, ps) in gate_functions(kind, arity or 2, width).items()}


class GateSpec(ModuleSpec):
    kind = "gate"

    def __init__(self, gate: str, arity: int = 2, width: int = 1, name: str | None = None):
        self.gate = gate.upper()
        self.arity = arity
        self.width = width
        self.inputs, self.outputs = gate_ports(self.gate, arity, width)
        self.fns = gate_functions(self.gate, arity, width)
        self.name = name or self.gate

    def params(self) -> dict:
        out = {"gate": self.gate}
        if self.gate in ("AND", "OR", "XOR"):
            out["arity"] = self.arity
        if self.gate == "MAJ3" and self.width != 1:
            out["width"] = self.width
        return out

    def evaluate(self, values: Mapping[str, int]) -> dict:
        return {o: int(fn(*(values[p] for p in ps))) for o, (fn, ps) in self.fns.items()}

    def check(self, execution: Execution, interval: Interval) -> Verdict:
        check_ports(self, execution)
        for o, (fn, ps) in self.fns.items():
            expect = pointwise(fn, [restrict(execution[p], interval) for p in ps])
            got = restrict(execution[o], interval)
            if not equal_on(got, expect, interval):
                w = first_difference(got, expect, interval)
                return Verdict.fail(f"{self.name}.{o} differs from the gate function", w, port=o)
        return Verdict.ok()

    def generate(self, inputs, strategy, interval, init=None, key=""):
        sigs = {p: restrict(inputs[p], interval) for p in self.inputs}
        return {o: pointwise(fn, [sigs[p] for p in ps]) for o, (fn, ps) in self.fns.items()}

