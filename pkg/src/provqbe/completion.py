"""Completion of joinless explanations.

A joinless explanation omits tuples of pure join relations, i.e. relations
whose every attribute is a foreign key into the key of one of the two
relations they connect (``writes(aid, wid)``).  Completion finds those tuples
again: whenever two tuples from different provenance components sit at
schema distance two through such a relation, every instance tuple joining
them on the key values is added.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .errors import IncompletableExplanationError, UnsupportedFragmentError
from .provgraph import ProvExample, ProvRow, build_prov_graph, connected_components
from .relcore import Instance, Schema, natural_key


@dataclass(frozen=True)
class Bridge:
    """A pure join relation and, per attribute, the relation/attr index it references."""

    relation: str
    targets: tuple  # (target_relation, target_attr_index) per attribute


def pure_join_bridges(schema: Schema) -> dict[str, Bridge]:
    refs = {}
    for fk in schema.foreign_keys:
        src = schema.relation(fk.from_relation)
        dst = schema.relation(fk.to_relation)
        if fk.to_attr not in dst.key:
            continue
        refs.setdefault(fk.from_relation, {})[src.index(fk.from_attr)] = (fk.to_relation, dst.index(fk.to_attr))
    out = {}
    for rel, by_attr in refs.items():
        decl = schema.relation(rel)
        if len(by_attr) != decl.arity:
            continue
        targets = tuple(by_attr[i] for i in range(decl.arity))
        if 1 <= len({r for r, _ in targets}) <= 2:
            out[rel] = Bridge(rel, targets)
    return out


def schema_distances(schema: Schema) -> dict[str, dict[str, int]]:
    adj = schema.graph()
    dist = {}
    for src in adj:
        seen = {src: 0}
        queue = deque([src])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in seen:
                    seen[y] = seen[x] + 1
                    queue.append(y)
        dist[src] = seen
    return dist


def _bridge_matches(bridge: Bridge, tv, ti, tj) -> bool:
    """Split the bridge's attributes between ``ti`` and ``tj`` so every reference holds."""
    sides = []
    for k, (rel, attr) in enumerate(bridge.targets):
        options = []
        for side, t in ((0, ti), (1, tj)):
            if t.relation == rel and type(t.values[attr]) is type(tv.values[k]) and t.values[attr] == tv.values[k]:
                options.append(side)
        if not options:
            return False
        sides.append(options)
    return any({0, 1} <= set(choice) for choice in itertools.product(*sides))


def bridging_tuples(ti, tj, d: Instance, bridges: dict) -> list[str]:
    found = []
    for bridge in bridges.values():
        rels = {r for r, _ in bridge.targets}
        if rels != {ti.relation, tj.relation}:
            continue
        for tv in d.tuples_of(bridge.relation):
            if _bridge_matches(bridge, tv, ti, tj):
                found.append(tv.annotation)
    return found


def _two_apart(ra: str, rb: str, dist) -> bool:
    # a relation joined to itself through a pure join relation sits at distance 0
    return ra == rb or dist[ra].get(rb) == 2


def complete_joinless(explanation, d: Instance, schema: Schema) -> frozenset:
    """Explanation plus every pure-join tuple bridging two of its components."""
    explanation = frozenset(explanation)
    p = build_prov_graph(explanation, d)
    comps = connected_components(p)
    if len(comps) <= 1:
        return explanation
    bridges = pure_join_bridges(schema)
    dist = schema_distances(schema)
    added = set()
    for ca, cb in itertools.combinations(comps, 2):
        for a in sorted(ca, key=natural_key):
            for b in sorted(cb, key=natural_key):
                ti, tj = d[a], d[b]
                if not _two_apart(ti.relation, tj.relation, dist):
                    continue
                added.update(bridging_tuples(ti, tj, d, bridges))
    completed = explanation | added
    remaining = connected_components(build_prov_graph(completed, d))
    if len(remaining) > 1:
        rels = [{d[a].relation for a in comp} for comp in remaining]
        bridgeable = False
        for ra, rb in itertools.combinations(rels, 2):
            for x in ra:
                for y in rb:
                    if _two_apart(x, y, dist) and any(
                        {r for r, _ in br.targets} == {x, y} for br in bridges.values()
                    ):
                        bridgeable = True
        if not bridgeable:
            names = " | ".join(" ".join(sorted(c, key=natural_key)) for c in remaining)
            raise UnsupportedFragmentError(
                f"explanation parts {names} are not one pure join tuple apart"
            )
        raise IncompletableExplanationError(
            "no tuple in the database connects the explanation's parts "
            + " | ".join(" ".join(sorted(c, key=natural_key)) for c in remaining)
        )
    return completed


def complete_example(ex: ProvExample, d: Instance, schema: Schema) -> tuple[ProvExample, list[frozenset]]:
    rows, added = [], []
    for row in ex.rows:
        full = complete_joinless(row.explanation, d, schema)
        rows.append(ProvRow(full, row.output))
        added.append(full - row.explanation)
    return ProvExample(tuple(rows)), added
