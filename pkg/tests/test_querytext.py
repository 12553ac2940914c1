import pytest

from provqbe import datasets
from provqbe.errors import QueryParseError
from provqbe.joingraph import build_join_graph, is_isomorphic
from provqbe.querytext import parse_datalog, parse_sql, render_datalog, render_sql
from provqbe.relcore import Var


def test_datalog_round_trip():
    text = "q(x) :- r(x, y), s(y, 'a', 3), y = 2"
    assert render_datalog(parse_datalog(text)) == text


def test_datalog_quote_styles():
    q = parse_datalog("q(x) :- conf(c, x), x = `Tel Aviv'")
    assert q.selections == ((Var("x"), "Tel Aviv"),)


@pytest.mark.parametrize("bad", ["q(x) :- ", "q(x) r(x)", "q(x) :- r(x", "q(x) :- r(x), x = "])
def test_datalog_errors(bad):
    with pytest.raises(QueryParseError):
        parse_datalog(bad)


def test_sql_rendering_of_intended_query(schema):
    sql = render_sql(parse_datalog(datasets.INTENDED_QUERY), schema)
    assert sql.startswith("SELECT conf.cname, author.aname FROM ")
    assert "org.oname = 'TAU'" in sql and "domain.dname = 'DB'" in sql
    assert sql.endswith(";")


def test_sql_round_trip_preserves_structure(schema):
    q = parse_datalog(datasets.INTENDED_QUERY)
    back = parse_sql(render_sql(q, schema), schema)
    assert is_isomorphic(build_join_graph(q, schema), build_join_graph(back, schema))


def test_sql_range_predicates(schema):
    dropped = []
    q = parse_sql("SELECT c.cname FROM conf c, pub WHERE c.cid = pub.cid AND pub.pyear > 2000", schema, dropped=dropped)
    assert len(q.atoms) == 2 and q.selections == ()
    assert dropped
    with pytest.raises(QueryParseError):
        parse_sql("SELECT pub.wid FROM pub WHERE pub.pyear > 2000", schema, on_range="error")


def test_like_wildcard_rejected(schema):
    with pytest.raises(QueryParseError):
        parse_sql("SELECT conf.cname FROM conf WHERE conf.cname LIKE 'S%'", schema)


def test_self_join_aliases(schema):
    q = parse_datalog(datasets.DOUBLED_WRITES_QUERY)
    sql = render_sql(q, schema)
    assert "writes AS writes1" in sql and "writes AS writes2" in sql
    back = parse_sql(sql, schema)
    assert is_isomorphic(build_join_graph(q, schema), build_join_graph(back, schema))


@pytest.mark.parametrize("n", range(1, 10))
def test_experiment_queries_parse(n):
    q = datasets.mas_query(n)
    q.validate(datasets.mas_schema())
    assert len(q.head) == 1
