import pytest

from provqbe import datasets
from provqbe.errors import NoConsistentQueryError, NoProjectionError
from provqbe.infer import (
    check_consistent,
    covers_example,
    infer_from_rows,
    infer_projection,
    infer_query,
    infer_selections,
    is_minimal,
)
from provqbe.joingraph import build_join_graph, enumerate_homomorphisms, is_isomorphic
from provqbe.provgraph import ProvExample, build_prov_graph
from provqbe.querytext import parse_datalog, render_datalog
from provqbe.relcore import AnnotatedTuple, Instance, RelationDecl, Schema, Var, evaluate


def test_projection_candidates(db, full_ex):
    proj = infer_projection(full_ex, db)
    assert proj.per_position == (frozenset({("conf", 1)}), frozenset({("author", 1)}))


def test_projection_conflict(db):
    ex = ProvExample.from_pairs([({"c2"}, ("SIGMOD",)), ({"o2"}, ("TAU",))])
    with pytest.raises(NoProjectionError) as info:
        infer_projection(ex, db)
    assert info.value.position == 0


def test_full_prov_gives_intended_query(schema, db, full_ex):
    r = infer_query(full_ex, db, schema)
    intended = parse_datalog(datasets.INTENDED_QUERY)
    assert is_isomorphic(r.join_graph, build_join_graph(intended, schema))
    assert {c for _, c in r.query.selections} == {"TAU", "DB"}
    assert len(r.covers) == 2 and r.completed_tuples == [frozenset(), frozenset()]


def test_joinless_gives_same_query(schema, db, full_ex, partial_ex):
    full = infer_query(full_ex, db, schema)
    joinless = infer_query(partial_ex, db, schema, mode="joinless")
    assert render_datalog(full.query) == render_datalog(joinless.query)
    assert joinless.completed_tuples == [{"w1", "dc2"}, {"w3", "dc1"}]
    assert joinless.stage_timings["completion"] > 0


def test_joinless_mode_rejects_unknown_mode(schema, db, full_ex):
    with pytest.raises(ValueError):
        infer_query(full_ex, db, schema, mode="fuzzy")


def test_single_tuple_row(schema, db):
    ex = ProvExample.from_pairs([({"c2"}, ("SIGMOD",))])
    r = infer_query(ex, db, schema)
    assert render_datalog(r.query) == "q(cname) :- conf(cid, cname), cid = 11"


def test_selections_skip_joined_keys():
    s = Schema(
        (
            RelationDecl("r", (("k", "integer"), ("x", "text"), ("y", "integer")), ("k",)),
            RelationDecl("t", (("k", "integer"), ("z", "text")), ("k",)),
        ),
        (),
    )
    d = Instance(
        s,
        [
            AnnotatedTuple("r1", "r", (1, "a", 7)),
            AnnotatedTuple("t1", "t", (1, "u")),
            AnnotatedTuple("r2", "r", (1, "b", 8)),
            AnnotatedTuple("t2", "t", (1, "v")),
        ],
    )
    q = parse_datalog("q(x) :- r(k, x, y), t(k, z)")
    g = build_join_graph(q, s)
    homs = []
    for expl, o in (({"r1", "t1"}, ("a",)), ({"r2", "t2"}, ("b",))):
        p = build_prov_graph(expl, d)
        homs.append(enumerate_homomorphisms(g, p, o, d))
    # same key in both rows, but it is a join variable
    assert infer_selections(q, homs, d).selections == ()


def test_selections_only_when_single_valued(schema, db, full_ex):
    r = infer_query(full_ex, db, schema)
    names = {v.name for v, _ in r.query.selections}
    assert "pyear" not in names and "ptitle" not in names


def test_different_relation_sets_fail_early(schema, db):
    ex = ProvExample.from_pairs([({"c2"}, ("SIGMOD",)), ({"c1", "p3"}, ("CIKM",))])
    with pytest.raises(NoConsistentQueryError):
        infer_query(ex, db, schema)


def test_max_nodes_cap(schema, db, full_ex):
    with pytest.raises(NoConsistentQueryError):
        infer_query(full_ex, db, schema, max_nodes=6)


def test_determinism(schema, db, partial_ex):
    texts = {render_datalog(infer_query(partial_ex, db, schema, mode="joinless").query) for _ in range(3)}
    assert len(texts) == 1


def test_check_consistent_examples(schema, db, full_ex):
    assert check_consistent(parse_datalog(datasets.INTENDED_QUERY), full_ex, db)
    doubled = parse_datalog(datasets.DOUBLED_WRITES_QUERY)
    assert check_consistent(doubled, full_ex, db)
    assert not is_minimal(doubled, full_ex, db, schema)
    assert is_minimal(parse_datalog(datasets.INTENDED_QUERY), full_ex, db, schema)


def test_missing_domain_atom_is_inconsistent(db, full_ex):
    q = parse_datalog(
        "q(cname, aname) :- author(aid, aname, oid), writes(aid, wid), pub(wid, cid, ptitle, pyear), "
        "conf(cid, cname), domain_conf(cid, did), org(oid, oname), oname = 'TAU'"
    )
    assert not check_consistent(q, full_ex, db)


def test_consistency_uses_extra_tuples(schema, db, partial_ex):
    # writes/domain_conf tuples come from the instance, not the explanation
    q = parse_datalog(datasets.INTENDED_QUERY)
    assert check_consistent(q, partial_ex, db)
    assert covers_example(q, partial_ex, db) is None


def test_value_rows_pipeline(schema, db):
    r = infer_from_rows(datasets.running_value_rows(), db, schema, mode="joinless")
    assert is_isomorphic(r.join_graph, build_join_graph(parse_datalog(datasets.INTENDED_QUERY), schema))
    assert set(r.stage_timings) == {"value_mapping", "completion", "inference"}


@pytest.mark.parametrize("n", range(1, 10))
def test_round_trip_experiment_queries(mas, n):
    schema, d = mas
    ex = datasets.example_from_query(datasets.mas_query(n), d)
    r = infer_query(ex, d, schema)
    outputs = evaluate(r.query, d)
    assert all(row.output in outputs for row in ex.rows)
    assert check_consistent(r.query, ex, d, schema)
    assert len(r.query.atoms) <= len(datasets.mas_query(n).atoms)
