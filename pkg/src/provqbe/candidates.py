"""Enumeration of candidate join graphs in growing size order.

A candidate is a multiset of relations (every provenance relation at least
once), a partition of the attribute slots into join classes, and a choice of
projected slot per output position.  Two slots may share a class only through
links of the edge vocabulary: foreign-key pairs plus attribute pairs seen
sharing a constant in some row's provenance.  Classes are therefore connected
sets in the slot link graph, and each component of that graph is partitioned
independently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator

from .joingraph import JoinGraph, build_join_graph, canonical_form, is_connected
from .provgraph import ProvExample, build_prov_graph
from .relcore import Atom, ConjunctiveQuery, Instance, Schema, Var


@dataclass(frozen=True)
class SizeBounds:
    min_nodes: int
    max_nodes: int
    distinct_relations: int
    output_arity: int
    largest_explanation: int


def size_bounds(ex: ProvExample, d: Instance) -> SizeBounds:
    dd = len(ex.relations(d))
    k = len(ex.rows[0].output)
    n = max(len(r.explanation) for r in ex.rows)
    return SizeBounds(dd, k + dd * n, dd, k, n)


@dataclass(frozen=True)
class ProjectionCandidates:
    per_position: tuple  # one frozenset of (relation, attr_index) per output position


def edge_vocabulary(ex: ProvExample, d: Instance, schema: Schema) -> frozenset:
    """Attribute pairs allowed to label a join: foreign keys plus witnessed shared constants."""
    vocab = set(schema.fk_index_pairs())
    for row in ex.rows:
        p = build_prov_graph(row.explanation, d)
        for (a, b), wits in p.shared_constants.items():
            ra, rb = d[a].relation, d[b].relation
            for i, j, _ in wits:
                vocab.add(frozenset(((ra, i), (rb, j))))
    return frozenset(vocab)


def _connected_subsets(start, allowed, adj) -> Iterator[frozenset]:
    """Connected subsets of ``allowed`` containing ``start``, each exactly once."""

    def extend(sub, ext, banned):
        yield sub
        ext = sorted(ext)
        for k, w in enumerate(ext):
            ban = banned | set(ext[:k])
            grown = (set(ext[k + 1:]) | (adj[w] & allowed)) - sub - {w} - ban
            yield from extend(sub | {w}, grown, ban | {w})

    yield from extend(frozenset([start]), adj[start] & allowed, frozenset([start]))


def connected_partitions(vertices, adj) -> Iterator[list]:
    """Set partitions of ``vertices`` whose blocks are connected in ``adj``."""
    vertices = frozenset(vertices)
    if not vertices:
        yield []
        return
    first = min(vertices)
    for block in _connected_subsets(first, vertices, adj):
        for rest in connected_partitions(vertices - block, adj):
            yield [block] + rest


def _components(vertices, adj) -> list[list]:
    seen, comps = set(), []
    for v in sorted(vertices):
        if v in seen:
            continue
        comp, stack = set(), [v]
        while stack:
            x = stack.pop()
            if x in comp:
                continue
            comp.add(x)
            stack.extend(adj[x] - comp)
        seen |= comp
        comps.append(sorted(comp))
    return comps


def _graph_from_blocks(rels, arities, blocks, projection, schema, vocabulary) -> JoinGraph:
    var_of = {}
    for k, block in enumerate(blocks):
        for s in block:
            var_of[s] = Var(f"j{k}")
    atoms = []
    for u, rel in enumerate(rels):
        atoms.append(Atom(rel, tuple(var_of.get((u, i), Var(f"f{u}_{i}")) for i in range(arities[u]))))
    head = tuple(var_of.get(s, Var(f"f{s[0]}_{s[1]}")) for s in projection)
    q = ConjunctiveQuery(head, tuple(atoms))
    return build_join_graph(q, schema, vocabulary)


def _order_key(g: JoinGraph, fk_pairs) -> tuple:
    non_fk = 0
    total = 0
    for e in g.edges:
        ra, rb = g.nodes[e.a].relation, g.nodes[e.b].relation
        for i, j in e.pairs:
            total += 1
            if frozenset(((ra, i), (rb, j))) not in fk_pairs:
                non_fk += 1
    return (non_fk, -total, canonical_form(g))


def candidates_for_multiset(rels, schema: Schema, proj: ProjectionCandidates, vocabulary) -> list[JoinGraph]:
    """All non-isomorphic connected candidates over one relation multiset, in canonical order."""
    rels = list(rels)
    arities = [schema.relation(r).arity for r in rels]
    slots = [(u, i) for u in range(len(rels)) for i in range(arities[u])]
    adj = {s: set() for s in slots}
    node_adj = {u: set() for u in range(len(rels))}
    for s, t in itertools.combinations(slots, 2):
        if frozenset(((rels[s[0]], s[1]), (rels[t[0]], t[1]))) in vocabulary:
            adj[s].add(t)
            adj[t].add(s)
            if s[0] != t[0]:
                node_adj[s[0]].add(t[0])
                node_adj[t[0]].add(s[0])
    if len(_components(node_adj, node_adj)) > 1:
        return []
    linked = [s for s in slots if adj[s]]
    comps = _components(linked, adj)
    comp_choices = [
        [[b for b in part if len(b) > 1] for part in connected_partitions(c, adj)] for c in comps
    ]
    proj_choices = []
    for options in proj.per_position:
        proj_choices.append(
            sorted((u, i) for u, rel in enumerate(rels) for r, i in options if r == rel)
        )
    if any(not c for c in proj_choices):
        return []
    fk_pairs = schema.fk_index_pairs()
    found = {}
    for choice in itertools.product(*comp_choices):
        blocks = [b for part in choice for b in part]
        reach = {u: set() for u in range(len(rels))}
        for b in blocks:
            nodes = {s[0] for s in b}
            for u in nodes:
                reach[u] |= nodes - {u}
        if len(_components(reach, reach)) > 1:
            continue
        for projection in itertools.product(*proj_choices):
            g = _graph_from_blocks(rels, arities, blocks, projection, schema, vocabulary)
            if not is_connected(g):
                continue
            key = _order_key(g, fk_pairs)
            if key[2] not in found or key < found[key[2]][0]:
                found[key[2]] = (key, g)
    return [g for _, g in sorted(found.values(), key=lambda kg: kg[0])]


def relation_multisets(relations, size: int) -> Iterator[tuple]:
    relations = sorted(relations)
    extra = size - len(relations)
    if extra < 0:
        return
    for more in itertools.combinations_with_replacement(relations, extra):
        yield tuple(sorted(relations + list(more)))


def enumerate_candidate_graphs(
    ex: ProvExample,
    d: Instance,
    schema: Schema,
    proj: ProjectionCandidates,
    bounds: SizeBounds,
    vocabulary=None,
    max_nodes: int | None = None,
) -> Iterator[JoinGraph]:
    """Connected candidate join graphs, node count ascending, no two isomorphic."""
    if vocabulary is None:
        vocabulary = edge_vocabulary(ex, d, schema)
    relations = ex.relations(d)
    top = bounds.max_nodes if max_nodes is None else min(bounds.max_nodes, max_nodes)
    for size in range(bounds.min_nodes, top + 1):
        for rels in relation_multisets(relations, size):
            yield from candidates_for_multiset(rels, schema, proj, vocabulary)
