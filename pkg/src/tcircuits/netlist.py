"""Compound modules: submodule instances wired together, plus graph analysis."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx

from .basic import ConfigurationError, ModuleSpec, make_module
from .strategy import AdversaryStrategy
from .timebase import ZERO


class NetlistError(ValueError):
    """A netlist file could not be parsed into a netlist."""


@dataclass(frozen=True)
class Violation:
    port: str
    message: str

    def __str__(self):
        return f"{self.port}: {self.message}"


@dataclass
class Netlist:
    name: str
    inputs: tuple
    outputs: tuple
    modules: dict = field(default_factory=dict)
    wires: list = field(default_factory=list)
    notes: str = ""

    def __post_init__(self):
        self.inputs = tuple(self.inputs)
        self.outputs = tuple(self.outputs)
        self.modules = dict(self.modules)
        self.wires = [tuple(w) for w in self.wires]

    # -- port bookkeeping ------------------------------------------------
    def submodule_inputs(self) -> list:
        return [f"{i}.{p}" for i, m in self.modules.items() for p in m.inputs]

    def submodule_outputs(self) -> list:
        return [f"{i}.{p}" for i, m in self.modules.items() for p in m.outputs]

    def driver_of(self, port: str) -> str:
        """The single source driving ``port`` (assumes a valid netlist)."""
        for src, dst in self.wires:
            if dst == port:
                return src
        raise KeyError(f"port {port!r} is not driven")

    def drivers(self) -> dict:
        return {dst: src for src, dst in self.wires}

    def all_ports(self) -> list:
        return list(self.inputs) + self.submodule_inputs() + self.submodule_outputs() + list(self.outputs)

    def owner(self, port: str) -> str | None:
        inst, _, _ = port.partition(".")
        return inst if inst in self.modules and "." in port else None

    # -- serialization ---------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "modules": [{"id": i, "kind": m.kind, "params": m.params()} for i, m in self.modules.items()],
            "wires": [{"from": s, "to": d} for s, d in self.wires],
            **({"notes": self.notes} if self.notes else {}),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Netlist":
        try:
            mods = {}
            for m in doc["modules"]:
                if m["id"] in mods:
                    raise NetlistError(f"duplicate module id {m['id']!r}")
                mods[m["id"]] = make_module(m["kind"], m.get("params", {}), name=m["id"])
            wires = [(w["from"], w["to"]) for w in doc.get("wires", [])]
            return cls(doc["name"], doc.get("inputs", []), doc.get("outputs", []), mods, wires,
                       doc.get("notes", ""))
        except KeyError as exc:
            raise NetlistError(f"netlist is missing field {exc}") from None
        except ConfigurationError as exc:
            raise NetlistError(str(exc)) from None

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def load(cls, path) -> "Netlist":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise NetlistError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(doc)

    def save(self, path):
        Path(path).write_text(self.dumps())


def validate(n: Netlist) -> list:
    """All well-formedness violations (empty list means valid)."""
    out = []
    sub_in = set(n.submodule_inputs())
    sub_out = set(n.submodule_outputs())
    ext_in, ext_out = set(n.inputs), set(n.outputs)
    for p in ext_in & ext_out:
        out.append(Violation(p, "name used for both an input and an output"))
    for p in (ext_in | ext_out):
        if "." in p:
            out.append(Violation(p, "exported port names must not contain '.'"))
    sources = ext_in | sub_out
    sinks = sub_in | ext_out
    driven: dict = {}
    for src, dst in n.wires:
        if src not in sources:
            out.append(Violation(src, "wire source is neither an exported input nor a submodule output"))
        if dst not in sinks:
            out.append(Violation(dst, "wire target is neither a submodule input nor an exported output"))
        driven.setdefault(dst, []).append(src)
    for dst, srcs in driven.items():
        if len(srcs) > 1:
            out.append(Violation(dst, f"driven by {len(srcs)} sources: {', '.join(sorted(srcs))}"))
    for p in sorted(sub_in):
        if p not in driven:
            out.append(Violation(p, "submodule input is neither an exported input nor driven by a submodule"))
    for p in n.outputs:
        if p not in driven:
            out.append(Violation(p, "exported output is not produced by any submodule"))
    return out


@dataclass
class GraphReport:
    graph: nx.DiGraph
    acyclic: bool
    cycles: list
    every_cycle_delayed: bool
    undelayed_cycles: list

    def to_dict(self) -> dict:
        return {
            "nodes": sorted(self.graph.nodes),
            "edges": sorted([list(e) for e in self.graph.edges]),
            "acyclic": self.acyclic,
            "cycles": self.cycles,
            "every_cycle_delayed": self.every_cycle_delayed,
            "undelayed_cycles": self.undelayed_cycles,
        }


def circuit_graph(n: Netlist) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(n.modules)
    for src, dst in n.wires:
        a, b = n.owner(src), n.owner(dst)
        if a is not None and b is not None:
            g.add_edge(a, b)
    return g


def _canonical_cycle(c: list) -> list:
    k = c.index(min(c))
    return c[k:] + c[:k]


def delaying(module: ModuleSpec, strategy: AdversaryStrategy | None) -> bool:
    return module.min_lag(strategy) > ZERO


def graph_analysis(n: Netlist, strategy: AdversaryStrategy | None = None) -> GraphReport:
    g = circuit_graph(n)
    cycles = sorted(_canonical_cycle(list(c)) for c in nx.simple_cycles(g))
    undelayed = [c for c in cycles if not any(delaying(n.modules[i], strategy) for i in c)]
    return GraphReport(g, not cycles, cycles, not undelayed, undelayed)


def zero_lag_order(n: Netlist, strategy: AdversaryStrategy | None = None) -> list:
    """Topological order of the submodules reacting within the same instant.

    Raises ``ValueError`` naming a cycle when the zero-lag subgraph is cyclic.
    """
    g = circuit_graph(n)
    zero = [i for i in n.modules if not delaying(n.modules[i], strategy)]
    sub = g.subgraph(zero)
    try:
        return list(nx.lexicographical_topological_sort(sub))
    except nx.NetworkXUnfeasible:
        cyc = [u for u, _ in nx.find_cycle(sub)]
        raise ValueError(f"zero-delay cycle: {' -> '.join(cyc + [cyc[0]])}") from None


class NotApplicable(ValueError):
    """A compositional bound does not apply to this netlist."""


def longest_weighted_path(n: Netlist, weights: dict):
    """Maximum over directed paths of the summed node weights (a DAG is required).

    Raises :class:`NotApplicable` naming a cycle, or the first submodule
    without a weight.
    """
    g = circuit_graph(n)
    if not nx.is_directed_acyclic_graph(g):
        cyc = [u for u, _ in nx.find_cycle(g)]
        raise NotApplicable(f"circuit graph has a cycle: {' -> '.join(cyc + [cyc[0]])}")
    missing = [i for i in n.modules if weights.get(i) is None]
    if missing:
        raise NotApplicable(f"no bound declared for submodule(s) {', '.join(sorted(missing))}")
    best: dict = {}
    for v in nx.lexicographical_topological_sort(g):
        preds = [best[u] for u in g.predecessors(v)]
        best[v] = weights[v] + max(preds, default=ZERO)
    return max(best.values(), default=ZERO)
