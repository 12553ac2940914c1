import pytest

from provqbe.errors import MissingTupleError, SchemaError
from provqbe.provgraph import (
    ProvExample,
    build_prov_graph,
    connected_components,
    from_edge_list,
    is_connected,
    to_edge_list,
)
from provqbe.relcore import AnnotatedTuple, Instance, RelationDecl, Schema


def test_partial_row_graph(db):
    p = build_prov_graph({"o2", "a2", "p1", "c2", "d1"}, db)
    assert p.sorted_edges() == [("a2", "o2"), ("c2", "p1")]
    assert connected_components(p) == [frozenset({"a2", "o2"}), frozenset({"c2", "p1"}), frozenset({"d1"})]
    assert not is_connected(p)


def test_full_row_graph_is_connected(db, full_ex):
    for row in full_ex.rows:
        assert is_connected(build_prov_graph(row.explanation, db))


def test_witnesses_are_oriented(db):
    p = build_prov_graph({"a2", "w1"}, db)
    assert p.witnesses("a2", "w1") == {(0, 0, 4)}
    assert p.join_pairs("w1", "p1") == frozenset()
    q = build_prov_graph({"w1", "p1"}, db)
    assert q.join_pairs("w1", "p1") == {(1, 0)}
    assert q.join_pairs("p1", "w1") == {(0, 1)}


def test_self_edge_needs_two_indices():
    s = Schema((RelationDecl("r", (("a", "integer"), ("b", "integer")), ()),), ())
    d = Instance(s, [AnnotatedTuple("t1", "r", (1, 1)), AnnotatedTuple("t2", "r", (1, 2))])
    p = build_prov_graph({"t1", "t2"}, d)
    assert p.has_edge("t1", "t1")
    assert not p.has_edge("t2", "t2")
    assert p.join_pairs("t1", "t1") == {(0, 1), (1, 0)}


def test_integer_and_text_do_not_link():
    s = Schema((RelationDecl("r", (("a", "integer"),), ()), RelationDecl("t", (("a", "text"),), ())), ())
    d = Instance(s, [AnnotatedTuple("r1", "r", (1,)), AnnotatedTuple("t1", "t", ("1",))])
    assert not build_prov_graph({"r1", "t1"}, d).edges


def test_unknown_annotation(db):
    with pytest.raises(MissingTupleError):
        build_prov_graph({"zz9"}, db)


def test_edge_list_round_trip(db):
    p = build_prov_graph({"o2", "a2", "p1", "c2", "d1"}, db)
    text = to_edge_list(p)
    nodes, edges = from_edge_list(text)
    assert nodes == set(p.nodes)
    assert {frozenset(e) for e in edges} == {frozenset(e) for e in p.edges}


def test_example_validation(db):
    with pytest.raises(SchemaError):
        ProvExample(()).validate(db)
    with pytest.raises(SchemaError):
        ProvExample.from_pairs([({"c1"}, ("CIKM",)), ({"c2"}, ("SIGMOD", "x"))]).validate(db)
    with pytest.raises(MissingTupleError):
        ProvExample.from_pairs([({"c9"}, ("CIKM",))]).validate(db)
