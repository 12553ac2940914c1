"""Provenance graphs of explanation tuple sets.

Two explanation tuples are adjacent when they share a constant at some pair
of attributes.  A tuple is self-adjacent only when it repeats a constant at
two distinct attribute indices, as in ``R(1, 1)``.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable

from .errors import MissingTupleError, SchemaError
from .relcore import Instance, natural_key, value_key


@dataclass(frozen=True)
class ProvRow:
    explanation: frozenset
    output: tuple

    def __post_init__(self):
        object.__setattr__(self, "explanation", frozenset(self.explanation))
        object.__setattr__(self, "output", tuple(self.output))


@dataclass(frozen=True)
class ProvExample:
    rows: tuple[ProvRow, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))

    @classmethod
    def from_pairs(cls, pairs) -> "ProvExample":
        return cls(tuple(ProvRow(frozenset(i), tuple(o)) for i, o in pairs))

    def validate(self, d: Instance) -> None:
        if not self.rows:
            raise SchemaError("prov-example has no rows")
        arity = len(self.rows[0].output)
        for n, row in enumerate(self.rows):
            if not row.explanation:
                raise SchemaError(f"row {n} has an empty explanation")
            if len(row.output) != arity:
                raise SchemaError(f"row {n} output arity {len(row.output)} differs from row 0 ({arity})")
            missing = sorted((a for a in row.explanation if a not in d), key=natural_key)
            if missing:
                raise MissingTupleError(f"row {n} names unknown tuples: {', '.join(missing)}")

    def relations(self, d: Instance) -> list[str]:
        """Distinct relation names across all rows, sorted."""
        return sorted({d[a].relation for row in self.rows for a in row.explanation})


def _edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if natural_key(a) <= natural_key(b) else (b, a)


@dataclass(frozen=True)
class ProvenanceGraph:
    nodes: frozenset
    edges: frozenset
    shared_constants: dict = field(compare=False, hash=False)

    def has_edge(self, a: str, b: str) -> bool:
        return _edge_key(a, b) in self.edges

    def witnesses(self, a: str, b: str) -> frozenset:
        """``(attr_of_a, attr_of_b, constant)`` triples with ``a[i] == b[j]``."""
        key = _edge_key(a, b)
        found = self.shared_constants.get(key, frozenset())
        if key == (a, b):
            return found
        return frozenset((j, i, c) for i, j, c in found)

    def join_pairs(self, a: str, b: str) -> frozenset:
        return frozenset((i, j) for i, j, _ in self.witnesses(a, b))

    def neighbors(self, a: str) -> set:
        out = set()
        for x, y in self.edges:
            if x == a:
                out.add(y)
            elif y == a:
                out.add(x)
        return out

    def sorted_nodes(self) -> list[str]:
        return sorted(self.nodes, key=natural_key)

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self.edges, key=lambda e: (natural_key(e[0]), natural_key(e[1])))


def build_prov_graph(explanation: Iterable[str], d: Instance) -> ProvenanceGraph:
    nodes = frozenset(explanation)
    missing = sorted((a for a in nodes if a not in d), key=natural_key)
    if missing:
        raise MissingTupleError(f"unknown tuples in explanation: {', '.join(missing)}")
    cells = defaultdict(list)
    for ann in sorted(nodes, key=natural_key):
        for i, v in enumerate(d[ann].values):
            cells[value_key(v)].append((ann, i, v))
    shared = defaultdict(set)
    for group in cells.values():
        for x, (a, i, v) in enumerate(group):
            for b, j, _ in group[x + 1:]:
                if a == b:
                    shared[(a, a)].add((i, j, v))
                    shared[(a, a)].add((j, i, v))
                else:
                    # group is in natural order, so (a, b) is already the edge key
                    shared[(a, b)].add((i, j, v))
    shared = {k: frozenset(v) for k, v in shared.items()}
    return ProvenanceGraph(nodes, frozenset(shared), shared)


def connected_components(g: ProvenanceGraph) -> list[frozenset]:
    adj = {n: set() for n in g.nodes}
    for a, b in g.edges:
        adj[a].add(b)
        adj[b].add(a)
    seen = set()
    comps = []
    for start in g.sorted_nodes():
        if start in seen:
            continue
        comp, stack = set(), [start]
        while stack:
            n = stack.pop()
            if n in comp:
                continue
            comp.add(n)
            stack.extend(adj[n] - comp)
        seen |= comp
        comps.append(frozenset(comp))
    return comps


def is_connected(g: ProvenanceGraph) -> bool:
    return len(connected_components(g)) <= 1


def to_edge_list(g: ProvenanceGraph) -> str:
    """One ``a b`` line per edge, then one line per isolated node."""
    lines = [f"{a} {b}" for a, b in g.sorted_edges()]
    touched = {n for e in g.edges for n in e}
    lines += [n for n in g.sorted_nodes() if n not in touched]
    return "\n".join(lines) + ("\n" if lines else "")


def from_edge_list(text: str) -> tuple[set, set]:
    nodes, edges = set(), set()
    for line in text.splitlines():
        parts = line.split()
        if not parts:
            continue
        nodes.update(parts)
        if len(parts) == 2:
            edges.add(_edge_key(*parts))
    return nodes, edges
