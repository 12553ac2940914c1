"""Join graphs of conjunctive queries and their homomorphisms into provenance graphs.

A join graph has one node per atom.  Atoms sharing a variable are linked,
but only along a spanning tree of that variable's occurrences, so a variable
used by three atoms contributes two edges, not a triangle.  Equality is
transitive, which makes the tree carry exactly the same constraints.  The
tree prefers foreign-key links, then links from a supplied vocabulary, then
links between atoms that are close in atom order.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .errors import IncompleteProjectionError, SchemaError
from .provgraph import ProvenanceGraph
from .querytext import name_classes, occurrences
from .relcore import (
    Atom,
    ConjunctiveQuery,
    Instance,
    Schema,
    Var,
    natural_key,
    value_key,
)


@dataclass(frozen=True)
class JoinNode:
    node_id: int
    relation: str
    projection_slots: tuple = ()  # (attr_index, head_position)
    constants: tuple = ()  # (attr_index, constant) fixed by the query

    def __post_init__(self):
        object.__setattr__(self, "projection_slots", tuple(sorted(set(self.projection_slots))))
        object.__setattr__(
            self, "constants", tuple(sorted(set(self.constants), key=lambda x: (x[0], value_key(x[1]))))
        )


@dataclass(frozen=True)
class JoinEdge:
    a: int
    b: int
    pairs: frozenset  # (attr_index in a, attr_index in b)

    def __post_init__(self):
        if self.a > self.b:
            raise ValueError("join edges are stored with a <= b")
        if not self.pairs:
            raise ValueError(f"edge {self.a}-{self.b} has no join pairs")
        object.__setattr__(self, "pairs", frozenset(self.pairs))


@dataclass(frozen=True)
class JoinGraph:
    nodes: tuple
    edges: tuple
    head_arity: int = 0

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        edges = tuple(sorted(self.edges, key=lambda e: (e.a, e.b)))
        object.__setattr__(self, "edges", edges)
        for pos, node in enumerate(self.nodes):
            if node.node_id != pos:
                raise ValueError("node ids must be 0..n-1 in node order")
        seen = set()
        for e in edges:
            if e.b >= len(self.nodes):
                raise ValueError(f"edge {e.a}-{e.b} references a missing node")
            if (e.a, e.b) in seen:
                raise ValueError(f"duplicate edge {e.a}-{e.b}")
            seen.add((e.a, e.b))

    def __len__(self):
        return len(self.nodes)

    def pairs(self, u: int, v: int) -> frozenset:
        """Join pairs oriented as (attr of u, attr of v)."""
        for e in self.edges:
            if (e.a, e.b) == (u, v):
                return e.pairs
            if (e.a, e.b) == (v, u):
                return frozenset((j, i) for i, j in e.pairs)
        return frozenset()

    def neighbors(self, u: int) -> set:
        out = set()
        for e in self.edges:
            if e.a == u and e.b != u:
                out.add(e.b)
            elif e.b == u and e.a != u:
                out.add(e.a)
        return out

    def relations(self) -> list[str]:
        return [n.relation for n in self.nodes]

    def validate(self, schema: Schema) -> None:
        for n in self.nodes:
            arity = schema.relation(n.relation).arity
            attrs = [i for i, _ in n.projection_slots] + [i for i, _ in n.constants]
            if any(not 0 <= i < arity for i in attrs):
                raise SchemaError(f"node {n.node_id} uses an attribute outside {n.relation}'s arity")
        for e in self.edges:
            ra = schema.relation(self.nodes[e.a].relation).arity
            rb = schema.relation(self.nodes[e.b].relation).arity
            if any(not (0 <= i < ra and 0 <= j < rb) for i, j in e.pairs):
                raise SchemaError(f"edge {e.a}-{e.b} uses an attribute outside relation arity")


def _link_tier(rel_a, i, rel_b, j, fk_pairs, vocabulary) -> int:
    key = frozenset(((rel_a, i), (rel_b, j)))
    if key in fk_pairs:
        return 0
    if vocabulary is not None and key in vocabulary:
        return 1
    return 2


def build_join_graph(
    q: ConjunctiveQuery, schema: Schema | None = None, vocabulary=None
) -> JoinGraph:
    """Join graph of ``q``; selections become fixed constants on every slot of their variable."""
    rels = [a.relation for a in q.atoms]
    fk_pairs = schema.fk_index_pairs() if schema is not None else frozenset()
    occ = occurrences(q)
    slots = defaultdict(set)
    consts = defaultdict(set)
    for pos, v in enumerate(q.head):
        for ai, ti in occ[v]:
            slots[ai].add((ti, pos))
    for ai, atom in enumerate(q.atoms):
        for ti, t in enumerate(atom.terms):
            if not isinstance(t, Var):
                consts[ai].add((ti, t))
    for v, c in q.selections:
        for ai, ti in occ[v]:
            consts[ai].add((ti, c))

    edge_pairs = defaultdict(set)
    for v, places in occ.items():
        if len(places) < 2:
            continue
        links = []
        for x, y in itertools.combinations(range(len(places)), 2):
            (ai, ti), (aj, tj) = places[x], places[y]
            tier = _link_tier(rels[ai], ti, rels[aj], tj, fk_pairs, vocabulary)
            links.append(((tier, aj - ai, ai, ti, aj, tj), x, y))
        links.sort()
        parent = list(range(len(places)))

        def find(k):
            while parent[k] != k:
                parent[k] = parent[parent[k]]
                k = parent[k]
            return k

        for _, x, y in links:
            rx, ry = find(x), find(y)
            if rx == ry:
                continue
            parent[rx] = ry
            (ai, ti), (aj, tj) = places[x], places[y]
            if ai == aj:
                edge_pairs[(ai, ai)].add((min(ti, tj), max(ti, tj)))
            else:
                edge_pairs[(ai, aj)].add((ti, tj))
    nodes = tuple(
        JoinNode(ai, rels[ai], tuple(slots[ai]), tuple(consts[ai])) for ai in range(len(q.atoms))
    )
    edges = tuple(JoinEdge(a, b, frozenset(p)) for (a, b), p in edge_pairs.items())
    return JoinGraph(nodes, edges, len(q.head))


def _slot_union(g: JoinGraph):
    """Union-find over (node, attr) slots joined by edges or by a shared head position."""
    parent = {}

    def find(s):
        parent.setdefault(s, s)
        while parent[s] != s:
            parent[s] = parent[parent[s]]
            s = parent[s]
        return s

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for e in g.edges:
        for i, j in e.pairs:
            union((e.a, i), (e.b, j))
    by_pos = {}
    for n in g.nodes:
        for attr, pos in n.projection_slots:
            if pos in by_pos:
                union(by_pos[pos], (n.node_id, attr))
            else:
                by_pos[pos] = (n.node_id, attr)
    return by_pos, find


def to_query(g: JoinGraph, schema: Schema | None = None, name: str = "q") -> ConjunctiveQuery:
    """Inverse of :func:`build_join_graph`; needs the schema for arities and variable names."""
    by_pos, find = _slot_union(g)
    missing = [p for p in range(g.head_arity) if p not in by_pos]
    if missing:
        raise IncompleteProjectionError(f"head positions {missing} are not projected by any node")

    def arity(n):
        if schema is not None:
            return schema.relation(n.relation).arity
        used = [i for i, _ in n.projection_slots] + [i for i, _ in n.constants]
        used += [i for e in g.edges if e.a == n.node_id for i, _ in e.pairs]
        used += [j for e in g.edges if e.b == n.node_id for _, j in e.pairs]
        return max(used, default=-1) + 1

    classes = {}
    for n in g.nodes:
        for ti in range(arity(n)):
            classes.setdefault(find((n.node_id, ti)), []).append((n.node_id, ti))
    class_list = list(classes.values())
    names = name_classes(class_list, lambda nid: g.nodes[nid].relation, schema)
    var_of = {}
    for members, nm in zip(class_list, names):
        for s in members:
            var_of[s] = Var(nm)
    atoms = tuple(
        Atom(n.relation, tuple(var_of[(n.node_id, ti)] for ti in range(arity(n)))) for n in g.nodes
    )
    selections = []
    for n in g.nodes:
        for ti, c in n.constants:
            sel = (var_of[(n.node_id, ti)], c)
            if sel not in selections:
                selections.append(sel)
    head = tuple(var_of[by_pos[p]] for p in range(g.head_arity))
    return ConjunctiveQuery(head, atoms, tuple(selections), name)


def is_connected(g: JoinGraph) -> bool:
    if not g.nodes:
        return True
    seen, stack = set(), [0]
    while stack:
        u = stack.pop()
        if u in seen:
            continue
        seen.add(u)
        stack.extend(g.neighbors(u) - seen)
    return len(seen) == len(g.nodes)


def _join_classes(g: JoinGraph) -> list[list]:
    """Slot classes tied together by edges; the tree inside a class is irrelevant."""
    _, find = _slot_union(g)
    classes = defaultdict(list)
    for e in g.edges:
        for i, j in e.pairs:
            classes[find((e.a, i))].append((e.a, i))
            classes[find((e.a, i))].append((e.b, j))
    return [sorted(set(c)) for c in classes.values()]


def _encode(g: JoinGraph, perm, classes) -> tuple:
    """Structure of ``g`` after renumbering node ``u`` to ``perm[u]``."""
    inv = [None] * len(perm)
    for u, p in enumerate(perm):
        inv[p] = g.nodes[u]
    nodes = tuple(
        (n.relation, n.projection_slots, tuple((i, value_key(c)) for i, c in n.constants)) for n in inv
    )
    blocks = tuple(sorted(tuple(sorted((perm[u], i) for u, i in c)) for c in classes))
    return nodes, blocks, g.head_arity


def canonical_form(g: JoinGraph) -> tuple:
    """Isomorphism-invariant encoding (minimum over relabelings of same-relation nodes).

    Joins are encoded as classes of equal slots rather than as edges, so two
    graphs differing only in which spanning tree links a class compare equal.
    """
    classes = _join_classes(g)
    groups = defaultdict(list)
    for n in g.nodes:
        groups[n.relation].append(n.node_id)
    rel_order = sorted(groups)
    best = None
    for choice in itertools.product(*(itertools.permutations(groups[r]) for r in rel_order)):
        perm = [None] * len(g.nodes)
        pos = 0
        for members in choice:
            for u in members:
                perm[u] = pos
                pos += 1
        enc = _encode(g, perm, classes)
        if best is None or enc < best:
            best = enc
    return best if best is not None else ((), (), g.head_arity)


def is_isomorphic(g1: JoinGraph, g2: JoinGraph) -> bool:
    if sorted(g1.relations()) != sorted(g2.relations()):
        return False
    return canonical_form(g1) == canonical_form(g2)


@dataclass(frozen=True)
class Homomorphism:
    """Node index -> provenance annotation."""

    mapping: tuple

    def __getitem__(self, node_id):
        return self.mapping[node_id]

    def image(self) -> frozenset:
        return frozenset(self.mapping)


@dataclass(frozen=True)
class Cover:
    homomorphisms: tuple

    def image(self) -> frozenset:
        return frozenset().union(*(h.image() for h in self.homomorphisms))

    def covers(self, p: ProvenanceGraph) -> bool:
        return self.image() == p.nodes

    def __len__(self):
        return len(self.homomorphisms)


def _same(a, b) -> bool:
    return type(a) is type(b) and a == b


def _candidates(g: JoinGraph, p: ProvenanceGraph, o: tuple, d: Instance) -> list[list[str]]:
    if any(pos >= len(o) for n in g.nodes for _, pos in n.projection_slots):
        raise ValueError(f"output {o} is shorter than the graph's projected positions")
    loops = {e.a: e.pairs for e in g.edges if e.a == e.b}
    ordered = p.sorted_nodes()
    out = []
    for n in g.nodes:
        cands = []
        for ann in ordered:
            t = d[ann]
            if t.relation != n.relation:
                continue
            if not all(_same(t.values[i], o[pos]) for i, pos in n.projection_slots):
                continue
            if not all(_same(t.values[i], c) for i, c in n.constants):
                continue
            own = p.join_pairs(ann, ann)
            if not all(i == j or (i, j) in own for i, j in loops.get(n.node_id, ())):
                continue
            cands.append(ann)
        out.append(cands)
    return out


def _search_order(g: JoinGraph, cands) -> list[int]:
    remaining = set(range(len(g.nodes)))
    order = []
    while remaining:
        placed = set(order)

        def rank(u):
            links = len(g.neighbors(u) & placed)
            return (-links, len(cands[u]), u)

        u = min(remaining, key=rank)
        order.append(u)
        remaining.discard(u)
    return order


def enumerate_homomorphisms(
    g: JoinGraph, p: ProvenanceGraph, o, d: Instance, limit: int = 0
) -> list[Homomorphism]:
    """All homomorphisms from ``g`` into ``p`` that project ``o``, sorted by image annotations.

    Edge conditions are read from the provenance graph's shared-constant
    witnesses; two atoms joined at the same index may also land on one tuple.
    """
    o = tuple(o)
    cands = _candidates(g, p, o, d)
    if any(not c for c in cands):
        return []
    order = _search_order(g, cands)
    pos_of = {u: k for k, u in enumerate(order)}
    witness = {}

    def joinable(ta, tb):
        key = (ta, tb)
        if key not in witness:
            witness[key] = p.join_pairs(ta, tb)
        return witness[key]

    domains = [len(cands[u]) for u in order]
    constraints = []
    for k, u in enumerate(order):
        cons = []
        for v in g.neighbors(u):
            if pos_of[v] >= k:
                continue
            pairs = g.pairs(v, u)
            m = np.zeros((len(cands[v]), len(cands[u])), dtype=np.uint8)
            for x, tv in enumerate(cands[v]):
                for y, tu in enumerate(cands[u]):
                    found = joinable(tv, tu)
                    m[x, y] = all((i, j) in found or (tv == tu and i == j) for i, j in pairs)
            cons.append((pos_of[v], m))
        constraints.append(cons)
    solutions = _kernels.solve_csp(domains, constraints, limit)
    homs = []
    for sol in solutions:
        mapping = [None] * len(g.nodes)
        for k, u in enumerate(order):
            mapping[u] = cands[u][sol[k]]
        homs.append(Homomorphism(tuple(mapping)))
    homs.sort(key=lambda h: tuple(natural_key(a) for a in h.mapping))
    return homs


def greedy_cover(homs, p: ProvenanceGraph) -> Optional[Cover]:
    """Pick homomorphisms greedily by newly covered nodes.

    Covering is monotone in the family, so greedy fails exactly when the
    union of all images misses a node; no exhaustive fallback is needed.
    """
    uncovered = set(p.nodes)
    chosen = []
    while uncovered:
        best, gain = None, 0
        for h in homs:
            g_ = len(h.image() & uncovered)
            if g_ > gain:
                best, gain = h, g_
        if best is None:
            return None
        chosen.append(best)
        uncovered -= best.image()
    return Cover(tuple(chosen))


def find_cover(g: JoinGraph, p: ProvenanceGraph, o, d: Instance) -> Optional[Cover]:
    return greedy_cover(enumerate_homomorphisms(g, p, o, d), p)


def is_homomorphism(g: JoinGraph, p: ProvenanceGraph, o, d: Instance, h: Homomorphism) -> bool:
    """Check the three homomorphism conditions directly against instance values."""
    o = tuple(o)
    if len(h.mapping) != len(g.nodes):
        return False
    for n, ann in zip(g.nodes, h.mapping):
        if ann not in p.nodes:
            return False
        t = d[ann]
        if t.relation != n.relation:
            return False
        if any(not _same(t.values[i], o[pos]) for i, pos in n.projection_slots):
            return False
        if any(not _same(t.values[i], c) for i, c in n.constants):
            return False
    for e in g.edges:
        ta, tb = d[h.mapping[e.a]], d[h.mapping[e.b]]
        if h.mapping[e.a] != h.mapping[e.b] and not p.has_edge(h.mapping[e.a], h.mapping[e.b]):
            return False
        if any(not _same(ta.values[i], tb.values[j]) for i, j in e.pairs):
            return False
    return True
