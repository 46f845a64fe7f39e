"""Message-plan graphs for single-hop networks and the BCCR codeword graph.

A message ``M_delta^nabla`` is sent jointly by transmitters ``delta`` to
receivers ``nabla``. Messages are grouped by ``delta`` into sets ``M_delta``,
placed in column ``|delta|``. An edge runs from ``M_delta1`` in column ``i`` to
``M_delta2`` in column ``i - 1`` when ``delta2`` is a subset of ``delta1``; the
set at the start of an edge is the cloud center.
"""
from __future__ import annotations

import graphlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError, StructureError


def _subset(values, limit: int, what: str) -> frozenset:
    out = frozenset(int(v) for v in values)
    if not out:
        raise StructureError(f"{what} must be nonempty")
    if min(out) < 1 or max(out) > limit:
        raise StructureError(f"{what} {sorted(out)} out of range 1..{limit}")
    return out


def _fmt_set(s) -> str:
    return "".join(str(i) for i in sorted(s)) if max(s, default=0) < 10 else ",".join(str(i) for i in sorted(s))


@dataclass(frozen=True, order=True)
class MessageLabel:
    delta: tuple
    nabla: tuple

    def __post_init__(self):
        object.__setattr__(self, "delta", tuple(sorted(set(int(v) for v in self.delta))))
        object.__setattr__(self, "nabla", tuple(sorted(set(int(v) for v in self.nabla))))
        if not self.delta or not self.nabla:
            raise StructureError("a message needs at least one transmitter and one receiver")

    def __str__(self):
        return f"M_{{{_fmt_set(self.delta)}}}^{{{_fmt_set(self.nabla)}}}"


@dataclass(frozen=True)
class NetworkSpec:
    k1: int
    k2: int
    messages: tuple = ()

    def __post_init__(self):
        if self.k1 < 1 or self.k2 < 1:
            raise StructureError("a network needs at least one transmitter and one receiver")
        msgs = []
        for m in self.messages:
            if not isinstance(m, MessageLabel):
                m = MessageLabel(m["delta"], m["nabla"]) if isinstance(m, dict) else MessageLabel(*m)
            _subset(m.delta, self.k1, "delta")
            _subset(m.nabla, self.k2, "nabla")
            msgs.append(m)
        if len(set(msgs)) != len(msgs):
            raise StructureError("at most one message per (delta, nabla) pair")
        object.__setattr__(self, "messages", tuple(sorted(msgs)))
        self._check_coverage()

    def transmitter_messages(self, i: int) -> frozenset:
        return frozenset(m for m in self.messages if i in m.delta)

    def receiver_messages(self, j: int) -> frozenset:
        return frozenset(m for m in self.messages if j in m.nabla)

    def _check_coverage(self):
        full = frozenset(self.messages)
        sent = frozenset().union(*(self.transmitter_messages(i) for i in range(1, self.k1 + 1)))
        heard = frozenset().union(*(self.receiver_messages(j) for j in range(1, self.k2 + 1)))
        assert sent == full == heard, "every message must be sent by some transmitter and heard by some receiver"

    def groups(self) -> dict:
        """``delta -> messages`` for every nonempty ``M_delta``."""
        out: dict = {}
        for m in self.messages:
            out.setdefault(m.delta, []).append(m)
        for delta, members in out.items():
            if self.k2 == 1:
                assert len(members) <= 1, f"M_{delta} has {len(members)} messages with one receiver"
            if self.k2 == 2:
                assert len(members) <= 3, f"M_{delta} has {len(members)} messages with two receivers"
        return {d: tuple(v) for d, v in sorted(out.items(), key=lambda kv: (len(kv[0]), kv[0]))}

    @classmethod
    def from_json(cls, data, path: str = "<network>") -> "NetworkSpec":
        try:
            return cls(int(data["k1"]), int(data["k2"]), tuple(data.get("messages", ())))
        except KeyError as exc:
            raise ParseError(f"missing key {exc.args[0]!r}", path) from None
        except (TypeError, StructureError) as exc:
            raise ParseError(str(exc), path) from None


def load_network(path) -> NetworkSpec:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", str(path)) from None
    if not isinstance(data, dict):
        raise ParseError("expected a JSON object", str(path))
    return NetworkSpec.from_json(data, str(path))


@dataclass(frozen=True)
class PlanGraph:
    """Directed graph with string node ids, per-node attributes and edges."""

    nodes: tuple
    edges: tuple
    attrs: dict = field(default_factory=dict)

    def predecessors(self, node) -> tuple:
        return tuple(a for a, b in self.edges if b == node)

    def in_degree(self, node) -> int:
        return len(self.predecessors(node))

    def is_acyclic(self) -> bool:
        sorter = graphlib.TopologicalSorter({v: self.predecessors(v) for v in self.nodes})
        try:
            sorter.prepare()
        except graphlib.CycleError:
            return False
        return True

    def to_json(self) -> str:
        return json.dumps(
            {"nodes": [{"id": v, **self.attrs.get(v, {})} for v in self.nodes], "edges": [list(e) for e in self.edges]},
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "PlanGraph":
        data = json.loads(text)
        nodes, attrs = [], {}
        for item in data["nodes"]:
            item = dict(item)
            node = item.pop("id")
            nodes.append(node)
            if item:
                attrs[node] = item
        return cls(tuple(nodes), tuple(tuple(e) for e in data["edges"]), attrs)

    def to_dot(self, name: str = "plan") -> str:
        lines = [f"digraph {name} {{", "  rankdir=LR;"]
        for v in self.nodes:
            label = self.attrs.get(v, {}).get("label", v)
            lines.append(f'  "{v}" [label="{label}"];')
        for a, b in self.edges:
            lines.append(f'  "{a}" -> "{b}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


def to_dot(graph: PlanGraph, name: str = "plan") -> str:
    return graph.to_dot(name)


def to_json(graph: PlanGraph) -> str:
    return graph.to_json()


def from_json(text: str) -> PlanGraph:
    return PlanGraph.from_json(text)


def build_plan(spec: NetworkSpec) -> PlanGraph:
    """One node per nonempty ``M_delta``, edges only between adjacent columns.

    Containment across non-adjacent columns is left to transitive reachability.
    """
    groups = spec.groups()
    ids = {delta: "M_{" + _fmt_set(delta) + "}" for delta in groups}
    attrs = {
        ids[d]: {"column": len(d), "delta": list(d), "messages": [str(m) for m in members]}
        for d, members in groups.items()
    }
    edges = []
    for d1 in groups:
        for d2 in groups:
            if len(d2) == len(d1) - 1 and set(d2) < set(d1):
                edges.append((ids[d1], ids[d2]))
    return PlanGraph(tuple(ids[d] for d in groups), tuple(edges), attrs)


# cloud centers of each codeword in the BCCR scheme
BCCR_CLOUD_CENTERS = {
    "W1": (),
    "U1": ("W1",),
    "X1": ("W1", "U1"),
    "W2": (),
    "V2": ("W2",),
    "X2": ("W2", "V2"),
    "WB": ("W1", "W2"),
    "UB": ("W1", "W2", "WB", "U1"),
    "VB": ("W1", "W2", "WB", "V2"),
    "XB": ("W1", "U1", "X1", "W2", "V2", "X2", "WB", "UB", "VB"),
}


def bccr_graph() -> PlanGraph:
    """Superposition graph of the BCCR codewords (edge = cloud center -> satellite)."""
    nodes = tuple(BCCR_CLOUD_CENTERS)
    edges = tuple((c, v) for v, centers in BCCR_CLOUD_CENTERS.items() for c in centers)
    return PlanGraph(nodes, edges)
