"""Query inference from prov-examples.

The search streams candidate join graphs in growing node count and keeps the
first one whose homomorphisms cover every row's provenance graph.  Because
the stream is size-ordered, that graph is minimal within the edge
vocabulary.  Constants are then added for attributes that take a single value
across every homomorphism of every row.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .candidates import (
    ProjectionCandidates,
    SizeBounds,
    edge_vocabulary,
    enumerate_candidate_graphs,
    size_bounds,
)
from .completion import complete_example
from .errors import NoConsistentQueryError, NoProjectionError
from .formats import ExampleRow, rows_to_example
from .joingraph import (
    JoinGraph,
    build_join_graph,
    enumerate_homomorphisms,
    greedy_cover,
    to_query,
)
from .provgraph import ProvExample, ProvRow, build_prov_graph
from .querytext import occurrences
from .relcore import ConjunctiveQuery, Instance, Schema, value_key
from .valuemap import DEFAULT_THRESHOLD, map_values

MODES = ("full", "joinless")


def _same(a, b) -> bool:
    return type(a) is type(b) and a == b


def infer_projection(ex: ProvExample, d: Instance) -> ProjectionCandidates:
    """Per output position, the (relation, attr) pairs holding the output value in every row."""
    arity = len(ex.rows[0].output)
    per_position = []
    for pos in range(arity):
        common = None
        for row in ex.rows:
            found = set()
            for ann in row.explanation:
                t = d[ann]
                for i, v in enumerate(t.values):
                    if _same(v, row.output[pos]):
                        found.add((t.relation, i))
            common = found if common is None else common & found
        if not common:
            raise NoProjectionError(pos)
        per_position.append(frozenset(common))
    return ProjectionCandidates(tuple(per_position))


def covers_for_graph(g: JoinGraph, ex: ProvExample, d: Instance, graphs=None):
    """All homomorphisms and a cover per row, or None as soon as one row has no cover."""
    all_homs, covers = [], []
    for n, row in enumerate(ex.rows):
        p = graphs[n] if graphs is not None else build_prov_graph(row.explanation, d)
        homs = enumerate_homomorphisms(g, p, row.output, d)
        cover = greedy_cover(homs, p)
        if cover is None:
            return None
        all_homs.append(homs)
        covers.append(cover)
    return all_homs, covers


def infer_selections(q: ConjunctiveQuery, homs_per_row, d: Instance) -> ConjunctiveQuery:
    """Add ``var = c`` for each unjoined, unprojected variable that is single-valued.

    ``homs_per_row`` holds, per row, homomorphisms from ``q``'s join graph in
    atom order.  Join variables are left free: their value is already tied
    to another atom, and keys differ between rows anyway.
    """
    head = set(q.head)
    fixed = {v for v, _ in q.selections}
    selections = list(q.selections)
    for v, places in occurrences(q).items():
        if v in head or v in fixed or len(places) != 1:
            continue
        ai, ti = places[0]
        seen = {}
        for homs in homs_per_row:
            for h in homs:
                c = d[h[ai]].values[ti]
                seen[value_key(c)] = c
                if len(seen) > 1:
                    break
            if len(seen) > 1:
                break
        if len(seen) == 1:
            selections.append((v, next(iter(seen.values()))))
    return q.with_selections(tuple(selections))


@dataclass
class InferenceResult:
    query: ConjunctiveQuery
    join_graph: JoinGraph
    covers: list
    homomorphisms: list = field(repr=False)
    completed_tuples: list
    example: ProvExample
    bounds: SizeBounds
    stage_timings: dict


def _relation_set_check(ex: ProvExample, d: Instance) -> None:
    sets = [frozenset(d[a].relation for a in row.explanation) for row in ex.rows]
    if len(set(sets)) > 1:
        raise NoConsistentQueryError(
            "rows draw on different relations ("
            + " vs ".join(",".join(sorted(s)) for s in dict.fromkeys(sets))
            + "), so no query is consistent with all of them"
        )


def search_graphs(ex: ProvExample, d: Instance, schema: Schema, max_nodes: int | None = None):
    """First candidate graph covering every row, with its homomorphisms and covers.

    Returns ``(graph, homs_per_row, covers, bounds, vocabulary)``.
    """
    proj = infer_projection(ex, d)
    _relation_set_check(ex, d)
    bounds = size_bounds(ex, d)
    vocab = edge_vocabulary(ex, d, schema)
    graphs = [build_prov_graph(row.explanation, d) for row in ex.rows]
    for g in enumerate_candidate_graphs(ex, d, schema, proj, bounds, vocab, max_nodes):
        found = covers_for_graph(g, ex, d, graphs)
        if found is not None:
            return g, found[0], found[1], bounds, vocab
    top = bounds.max_nodes if max_nodes is None else min(bounds.max_nodes, max_nodes)
    raise NoConsistentQueryError(f"no candidate join graph with at most {top} nodes covers every row")


def infer_query(
    ex: ProvExample,
    d: Instance,
    schema: Schema,
    mode: str = "full",
    max_nodes: int | None = None,
    value_mapping_seconds: float = 0.0,
) -> InferenceResult:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    ex.validate(d)
    timings = {"value_mapping": value_mapping_seconds, "completion": 0.0, "inference": 0.0}
    completed = [frozenset() for _ in ex.rows]
    if mode == "joinless":
        # projection comes from the explanation as given, before bridging tuples are added
        infer_projection(ex, d)
        start = time.perf_counter()
        ex, completed = complete_example(ex, d, schema)
        timings["completion"] = time.perf_counter() - start
    start = time.perf_counter()
    g, homs, covers, bounds, vocab = search_graphs(ex, d, schema, max_nodes)
    q = infer_selections(to_query(g, schema), homs, d)
    timings["inference"] = time.perf_counter() - start
    return InferenceResult(
        query=q,
        join_graph=build_join_graph(q, schema, vocab),
        covers=covers,
        homomorphisms=homs,
        completed_tuples=completed,
        example=ex,
        bounds=bounds,
        stage_timings=timings,
    )


def map_example_rows(rows, d: Instance, threshold: float = DEFAULT_THRESHOLD):
    """Resolve value rows to tuple ids; returns the example and the matches per row."""
    resolved, matches = [], []
    for row in rows:
        if row.is_values:
            found = map_values(row.values, d, threshold)
            ids = tuple(dict.fromkeys(m.annotation for m in found))
            resolved.append(ExampleRow(row.output, tuple_ids=ids))
            matches.append(found)
        else:
            resolved.append(row)
            matches.append([])
    return rows_to_example(resolved), matches


def infer_from_rows(
    rows,
    d: Instance,
    schema: Schema,
    mode: str = "full",
    threshold: float = DEFAULT_THRESHOLD,
    max_nodes: int | None = None,
) -> InferenceResult:
    """Value mapping, then completion, then inference; each stage is timed."""
    start = time.perf_counter()
    ex, _ = map_example_rows(rows, d, threshold)
    mapped = time.perf_counter() - start
    return infer_query(ex, d, schema, mode, max_nodes, value_mapping_seconds=mapped)


# consistency


def check_row(q: ConjunctiveQuery, row: ProvRow, d: Instance, schema: Schema) -> bool:
    """Consistency of one row, with the extra tuples drawn from ``d``.

    Lineage only grows with the instance, so the best choice of extra tuples
    is every tuple of ``q``'s relations.  The row is consistent when the
    homomorphisms projecting its output into that larger provenance graph
    together touch every explanation tuple.
    """
    if any(a not in d for a in row.explanation):
        return False
    rels = {a.relation for a in q.atoms}
    if any(d[a].relation not in rels for a in row.explanation):
        return False
    if len(row.output) != len(q.head):
        return False
    extra = {t.annotation for r in rels for t in d.tuples_of(r)}
    p = build_prov_graph(row.explanation | extra, d)
    g = build_join_graph(q, schema)
    touched = set()
    for h in enumerate_homomorphisms(g, p, row.output, d):
        touched |= h.image()
        if row.explanation <= touched:
            return True
    return False


def check_consistent(q: ConjunctiveQuery, ex: ProvExample, d: Instance, schema: Schema | None = None) -> bool:
    schema = schema or d.schema
    q.validate(schema)
    return all(check_row(q, row, d, schema) for row in ex.rows)


def covers_example(q: ConjunctiveQuery, ex: ProvExample, d: Instance, schema: Schema | None = None) -> list | None:
    """Covers of each row's own provenance graph by ``q``'s join graph, or None."""
    g = build_join_graph(q, schema or d.schema)
    found = covers_for_graph(g, ex, d)
    return None if found is None else found[1]


def minimal_size(ex: ProvExample, d: Instance, schema: Schema, max_nodes: int | None = None) -> int:
    g, *_ = search_graphs(ex, d, schema, max_nodes)
    return len(g)


def smaller_covering_graph(ex: ProvExample, d: Instance, schema: Schema, size: int) -> JoinGraph | None:
    """Any candidate with fewer than ``size`` nodes covering every row, by exhaustion."""
    if size <= 1:
        return None
    try:
        g, *_ = search_graphs(ex, d, schema, max_nodes=size - 1)
    except NoConsistentQueryError:
        return None
    return g


def is_minimal(q: ConjunctiveQuery, ex: ProvExample, d: Instance, schema: Schema) -> bool:
    return smaller_covering_graph(ex, d, schema, len(q.atoms)) is None


def format_timings(timings: dict) -> str:
    lines = ["# timings (seconds)"]
    for stage in ("value_mapping", "completion", "inference"):
        lines.append(f"{stage}\t{timings.get(stage, 0.0):.6f}")
    return "\n".join(lines) + "\n"


__all__ = [
    "InferenceResult",
    "MODES",
    "check_consistent",
    "check_row",
    "covers_example",
    "covers_for_graph",
    "format_timings",
    "infer_from_rows",
    "infer_projection",
    "infer_query",
    "infer_selections",
    "is_minimal",
    "map_example_rows",
    "minimal_size",
    "search_graphs",
    "smaller_covering_graph",
]
