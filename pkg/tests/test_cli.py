import io
import json
import re

import pytest

from provqbe import datasets
from provqbe.cli import main
from provqbe.formats import dumps, example_rows_to_dict, schema_to_dict
from provqbe.formats import ExampleRow
from provqbe.joingraph import build_join_graph, is_isomorphic
from provqbe.querytext import parse_sql

DATA = datasets.data_path("")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def shared(example, schema="running_schema.json", instance="running_instance.json"):
    return ["--schema", str(DATA / schema), "--instance", str(DATA / instance), "--example", str(example)]


def write_rows(tmp_path, rows, name="ex.json"):
    p = tmp_path / name
    p.write_text(dumps(example_rows_to_dict(rows)))
    return p


def test_infer_values_joinless():
    code, out, _ = run("infer", *shared(DATA / "prov_values.json"), "--joinless")
    assert code == 0
    assert out == (
        "q(cname, aname) :- author(aid, aname, oid), conf(cid, cname), domain(did, dname), "
        "domain_conf(cid, did), org(oid, oname), pub(wid, cid, ptitle, pyear), writes(aid, wid), "
        "dname = 'DB', oname = 'TAU'\n"
    )


def test_infer_output_is_stable():
    first = run("infer", *shared(DATA / "prov_full.json"))
    assert first == run("infer", *shared(DATA / "prov_full.json"))


def test_timings_block():
    code, out, _ = run("infer", *shared(DATA / "prov_partial.json"), "--joinless", "--timings")
    assert code == 0
    query, block = out.split("\n\n")
    assert query.startswith("q(")
    stages = [line.split("\t")[0] for line in block.strip().splitlines()[1:]]
    assert stages == ["value_mapping", "completion", "inference"]


def test_query1_sql():
    code, out, _ = run(
        "infer",
        *shared(DATA / "mas_q1_prov.json", "mas_schema.json", "mas_instance.json"),
        "--style",
        "sql",
    )
    assert code == 0
    schema = datasets.mas_schema()
    want = parse_sql(datasets.MAS_QUERIES[1], schema)
    assert is_isomorphic(build_join_graph(parse_sql(out, schema), schema), build_join_graph(want, schema))


def test_empty_example_is_usage_error(tmp_path):
    p = tmp_path / "empty.json"
    p.write_text("")
    code, _, err = run("infer", *shared(p))
    assert code == 2 and "empty" in err


def test_bad_arguments():
    assert run("infer")[0] == 2
    assert run("infer", *shared(DATA / "prov_full.json"), "--sim-threshold", "3")[0] == 2


def test_malformed_example(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{")
    assert run("infer", *shared(p))[0] == 3


def test_map_values_report():
    code, out, _ = run("map-values", *shared(DATA / "prov_values.json"))
    assert code == 0
    first_row = [line.split("\t")[1] for line in out.splitlines()[:6]]
    assert first_row == ["o2", "a2", "p1", "p2", "c2", "d1"]


def test_map_values_without_values(tmp_path):
    p = write_rows(tmp_path, [ExampleRow(("SIGMOD",), values=())])
    assert run("map-values", *shared(p)) == (0, "", "")


def test_map_values_unmatched(tmp_path):
    p = write_rows(tmp_path, [ExampleRow(("SIGMOD",), values=("SIGMOD", "Qwertyuiop"))])
    code, out, _ = run("map-values", *shared(p))
    assert code == 4
    assert out.splitlines()[1].split("\t")[4] == "unmatched"


def test_infer_unmatched_value(tmp_path):
    p = write_rows(tmp_path, [ExampleRow(("SIGMOD",), values=("Qwertyuiop",))])
    assert run("infer", *shared(p))[0] == 4


def test_complete_partial(tmp_path):
    target = tmp_path / "done.json"
    code, out, _ = run("complete", *shared(DATA / "prov_partial.json"), "--output", str(target))
    assert code == 0 and out == ""
    rows = json.loads(target.read_text())["rows"]
    assert rows[0]["tuple_ids"][-2:] == ["dc2", "w1"]
    assert rows[1]["tuple_ids"][-2:] == ["dc1", "w3"]


def test_complete_connected_is_byte_identical():
    code, out, _ = run("complete", *shared(DATA / "prov_full.json"))
    assert code == 0
    assert out == (DATA / "prov_full.json").read_text()


def test_complete_then_infer_equals_joinless(tmp_path):
    done = tmp_path / "done.json"
    run("complete", *shared(DATA / "prov_partial.json"), "--output", str(done))
    assert run("infer", *shared(done))[1] == run("infer", *shared(DATA / "prov_partial.json"), "--joinless")[1]


def test_complete_wide_gap(tmp_path):
    p = write_rows(tmp_path, [ExampleRow(("SIGMOD", "Alice"), tuple_ids=("o2", "a2", "c2", "dc2", "d1"))])
    assert run("complete", *shared(p))[0] == 6


def test_incompletable(tmp_path):
    inst = json.loads((DATA / "running_instance.json").read_text())
    inst["relations"]["writes"] = [w for w in inst["relations"]["writes"] if w["annotation"] != "w1"]
    ipath = tmp_path / "inst.json"
    ipath.write_text(json.dumps(inst))
    p = write_rows(tmp_path, [ExampleRow(("SIGMOD",), tuple_ids=("a2", "p1", "c2"))])
    args = ["--schema", str(DATA / "running_schema.json"), "--instance", str(ipath), "--example", str(p)]
    assert run("complete", *args)[0] == 5


def test_no_projection(tmp_path):
    p = write_rows(
        tmp_path,
        [ExampleRow(("SIGMOD",), tuple_ids=("c2",)), ExampleRow(("TAU",), tuple_ids=("o2",))],
    )
    assert run("infer", *shared(p))[0] == 7


def test_no_consistent_query(tmp_path):
    p = write_rows(
        tmp_path,
        [ExampleRow(("SIGMOD",), tuple_ids=("c2",)), ExampleRow(("CIKM",), tuple_ids=("c1", "p3"))],
    )
    assert run("infer", *shared(p))[0] == 8


def test_check_intended():
    code, out, _ = run("check", *shared(DATA / "prov_full.json"), "--query", str(DATA / "intended_query.dl"))
    assert (code, out) == (0, "consistent\n")


def test_check_doubled_writes():
    code, out, _ = run("check", *shared(DATA / "prov_full.json"), "--query", str(DATA / "doubled_writes.dl"))
    assert code == 0
    assert out.startswith("consistent\nnote: not minimal")


def test_check_missing_domain(tmp_path):
    q = tmp_path / "q.dl"
    q.write_text(
        "q(cname, aname) :- author(aid, aname, oid), writes(aid, wid), pub(wid, cid, ptitle, pyear), "
        "conf(cid, cname), domain_conf(cid, did), org(oid, oname), oname = 'TAU'\n"
    )
    code, out, _ = run("check", *shared(DATA / "prov_full.json"), "--query", str(q))
    assert (code, out) == (1, "inconsistent\n")


def test_check_sql_and_parse_error(tmp_path):
    q = tmp_path / "q.sql"
    q.write_text("SELECT conf.cname FROM conf WHERE conf.cid = 11;")
    p = write_rows(tmp_path, [ExampleRow(("SIGMOD",), tuple_ids=("c2",))])
    assert run("check", *shared(p), "--query", str(q))[:2] == (0, "consistent\n")
    q.write_text("q(x) :- conf(")
    assert run("check", *shared(p), "--query", str(q))[0] == 3
