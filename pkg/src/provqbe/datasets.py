"""Bundled fixtures: the academic running example and a synthetic MAS-style database."""

from __future__ import annotations

import random
from functools import lru_cache
from importlib import resources

from .formats import ExampleRow
from .provgraph import ProvExample, ProvRow
from .relcore import (
    INTEGER,
    TEXT,
    AnnotatedTuple,
    ConjunctiveQuery,
    ForeignKey,
    Instance,
    RelationDecl,
    Schema,
    evaluate,
    natural_key,
    values_key,
)

I, T = INTEGER, TEXT


def running_schema() -> Schema:
    return Schema(
        (
            RelationDecl("org", (("oid", I), ("oname", T)), ("oid",)),
            RelationDecl("author", (("aid", I), ("aname", T), ("oid", I)), ("aid",)),
            RelationDecl("domain_conf", (("cid", I), ("did", I)), ("cid", "did")),
            RelationDecl("pub", (("wid", I), ("cid", I), ("ptitle", T), ("pyear", I)), ("wid",)),
            RelationDecl("writes", (("aid", I), ("wid", I)), ("aid", "wid")),
            RelationDecl("conf", (("cid", I), ("cname", T)), ("cid",)),
            RelationDecl("domain", (("did", I), ("dname", T)), ("did",)),
        ),
        (
            ForeignKey("author", "oid", "org", "oid"),
            ForeignKey("writes", "aid", "author", "aid"),
            ForeignKey("writes", "wid", "pub", "wid"),
            ForeignKey("pub", "cid", "conf", "cid"),
            ForeignKey("domain_conf", "cid", "conf", "cid"),
            ForeignKey("domain_conf", "did", "domain", "did"),
        ),
    )


_RUNNING_ROWS = {
    "org": [("o1", 1, "UMICH"), ("o2", 2, "TAU")],
    "author": [("a1", 3, "Carol", 1), ("a2", 4, "Alice", 2), ("a3", 5, "Bob", 2)],
    "domain_conf": [("dc1", 10, 18), ("dc2", 11, 18)],
    "pub": [("p1", 6, 11, "X", 2014), ("p2", 7, 11, "Y", 2014), ("p3", 8, 10, "Z", 2007)],
    "writes": [("w1", 4, 6), ("w2", 4, 7), ("w3", 5, 8), ("w4", 3, 6)],
    "conf": [("c1", 10, "CIKM"), ("c2", 11, "SIGMOD")],
    "domain": [("d1", 18, "DB")],
}


def running_instance() -> Instance:
    schema = running_schema()
    return Instance(
        schema,
        (AnnotatedTuple(row[0], rel, row[1:]) for rel, rows in _RUNNING_ROWS.items() for row in rows),
    )


# the intended query needs the org atom for its oname selection; the domain is stored as 'DB'
INTENDED_QUERY = (
    "q(cname, aname) :- author(aid, aname, oid), writes(aid, wid), pub(wid, cid, ptitle, pyear), "
    "conf(cid, cname), domain_conf(cid, did), domain(did, dname), org(oid, oname), "
    "oname = 'TAU', dname = 'DB'"
)

DOUBLED_WRITES_QUERY = (
    "q(cname, aname) :- author(aid, aname, oid), writes(aid, wid1), pub(wid1, cid, ptitle1, pyear1), "
    "writes(aid, wid2), pub(wid2, cid, ptitle2, pyear2), conf(cid, cname), domain_conf(cid, did), "
    "domain(did, dname), org(oid, oname), oname = 'TAU', dname = 'DB'"
)

FULL_PROV = (
    (("SIGMOD", "Alice"), ("o2", "a2", "p1", "p2", "w1", "w2", "c2", "dc2", "d1")),
    # the instance holds CIKM, not EDBT, for Bob's publication
    (("CIKM", "Bob"), ("o2", "a3", "p3", "w3", "c1", "dc1", "d1")),
)

PARTIAL_PROV = (
    (("SIGMOD", "Alice"), ("o2", "a2", "p1", "c2", "d1")),
    (("CIKM", "Bob"), ("o2", "a3", "p3", "c1", "d1")),
)

VALUE_PROV = (
    (("SIGMOD", "Alice"), ("TAU", "Alice", "X", "Y", "SIGMOD", "DB")),
    (("CIKM", "Bob"), ("TAU", "Bob", "Z", "CIKM", "DB")),
)


def running_example(kind: str = "full") -> ProvExample:
    rows = {"full": FULL_PROV, "partial": PARTIAL_PROV}[kind]
    return ProvExample(tuple(ProvRow(frozenset(ids), out) for out, ids in rows))


def running_value_rows() -> list[ExampleRow]:
    return [ExampleRow(out, values=vals) for out, vals in VALUE_PROV]


def data_path(name: str):
    return resources.files("provqbe") / "data" / name


def mas_schema() -> Schema:
    return Schema(
        (
            RelationDecl("org", (("oid", I), ("name", T)), ("oid",)),
            RelationDecl("author", (("aid", I), ("name", T), ("oid", I)), ("aid",)),
            RelationDecl("conf", (("cid", I), ("name", T)), ("cid",)),
            RelationDecl("domain", (("did", I), ("name", T)), ("did",)),
            RelationDecl("pub", (("pid", I), ("cid", I), ("title", T), ("year", I)), ("pid",)),
            RelationDecl("writes", (("aid", I), ("pid", I)), ("aid", "pid")),
            RelationDecl("domain_conf", (("cid", I), ("did", I)), ("cid", "did")),
            RelationDecl("domain_pub", (("pid", I), ("did", I)), ("pid", "did")),
        ),
        (
            ForeignKey("author", "oid", "org", "oid"),
            ForeignKey("pub", "cid", "conf", "cid"),
            ForeignKey("writes", "aid", "author", "aid"),
            ForeignKey("writes", "pid", "pub", "pid"),
            ForeignKey("domain_conf", "cid", "conf", "cid"),
            ForeignKey("domain_conf", "did", "domain", "did"),
            ForeignKey("domain_pub", "pid", "pub", "pid"),
            ForeignKey("domain_pub", "did", "domain", "did"),
        ),
    )


_ORGS = ["Tel Aviv University", "IBM", "University of Michigan", "MIT"]
_DOMAINS = ["Databases", "Machine Learning", "Theory"]
_CONFS = [("SIGMOD", 0), ("VLDB", 0), ("CIKM", 0), ("ICDE", 0), ("NeurIPS", 1), ("STOC", 2)]
_FIRST = ["Alice", "Bob", "Carol", "Dana", "Erez", "Fiona", "Gil", "Hila", "Ido", "Jun",
          "Kira", "Liam", "Maya", "Noam", "Omer", "Pia", "Ravi", "Sara", "Tal", "Uri"]
_WORDS = ["Adaptive", "Scalable", "Provenance", "Query", "Graph", "Learning", "Index", "Stream",
          "Join", "Sketch", "Robust", "Causal", "Sampling", "Lineage", "Vector", "Cost"]


@lru_cache(maxsize=None)
def mas_instance(seed: int = 7, n_authors: int = 20, n_pubs: int = 40) -> Instance:
    """Deterministic MAS-like instance.

    Id ranges are disjoint per relation kind and away from publication
    years, so equal integers only meet along foreign keys.
    """
    rng = random.Random(seed)
    tuples = []
    for k, name in enumerate(_ORGS, 1):
        tuples.append(AnnotatedTuple(f"o{k}", "org", (k, name)))
    for k, name in enumerate(_DOMAINS):
        tuples.append(AnnotatedTuple(f"d{k + 1}", "domain", (501 + k, name)))
    for k, (name, dom) in enumerate(_CONFS):
        tuples.append(AnnotatedTuple(f"c{k + 1}", "conf", (301 + k, name)))
        tuples.append(AnnotatedTuple(f"dc{k + 1}", "domain_conf", (301 + k, 501 + dom)))
    for k in range(n_authors):
        oid = 1 + k % len(_ORGS)
        tuples.append(AnnotatedTuple(f"a{k + 1}", "author", (101 + k, _FIRST[k % len(_FIRST)], oid)))
    writes = set()
    titles = set()
    for k in range(n_pubs):
        pid = 1001 + k
        conf = k % len(_CONFS) if k < 2 * len(_CONFS) else rng.randrange(len(_CONFS))
        year = 2001 + rng.randrange(14) if k % 5 else 2005
        while True:
            title = " ".join(rng.sample(_WORDS, 3))
            if title not in titles:
                titles.add(title)
                break
        tuples.append(AnnotatedTuple(f"p{k + 1}", "pub", (pid, 301 + conf, title, year)))
        tuples.append(AnnotatedTuple(f"dp{k + 1}", "domain_pub", (pid, 501 + _CONFS[conf][1])))
        for aid in rng.sample(range(101, 101 + n_authors), 1 + rng.randrange(2)):
            writes.add((aid, pid))
    for k, (aid, pid) in enumerate(sorted(writes)):
        tuples.append(AnnotatedTuple(f"w{k + 1}", "writes", (aid, pid)))
    return Instance(mas_schema(), tuples)


# experiment queries over the MAS schema; range predicates are dropped when parsed
MAS_QUERIES = {
    1: "SELECT author.name FROM writes, pub, conf, author WHERE writes.pid = pub.pid AND writes.aid = author.aid AND pub.cid = conf.cid AND conf.name LIKE 'SIGMOD';",
    2: "SELECT pub.title FROM conf, domain_conf, pub, domain_pub, domain WHERE conf.cid = domain_conf.cid AND conf.cid = pub.cid AND domain_conf.did = domain.did AND pub.pid = domain_pub.pid AND domain.name LIKE 'Databases';",
    3: "SELECT author.name FROM writes, pub, conf, author WHERE writes.pid = pub.pid AND writes.aid = author.aid AND pub.cid = conf.cid AND conf.name LIKE 'SIGMOD' AND pub.year > 2005;",
    4: "SELECT author.name FROM writes, pub, conf, author WHERE writes.pid = pub.pid AND writes.aid = author.aid AND pub.cid = conf.cid AND conf.name LIKE 'SIGMOD' AND pub.year > 2005 AND pub.year < 2015;",
    5: "SELECT author.name FROM author, writes, conf, domain_conf, pub, domain_pub, domain WHERE author.aid = writes.aid AND writes.pid = pub.pid AND conf.cid = domain_conf.cid AND conf.cid = pub.cid AND domain_conf.did = domain.did AND pub.pid = domain_pub.pid AND domain.name LIKE 'Databases';",
    6: "SELECT org.name FROM writes, pub, domain_conf, domain, author, org, conf, domain_pub WHERE writes.pid = pub.pid AND writes.aid = author.aid AND pub.pid = domain_pub.pid AND pub.cid = conf.cid AND domain_conf.did = domain.did AND domain_conf.cid = conf.cid AND author.oid = org.oid AND pub.year > 2005 AND domain.name LIKE 'Databases';",
    7: "SELECT author.name FROM writes, pub, conf, author, org WHERE author.oid = org.oid AND writes.pid = pub.pid AND writes.aid = author.aid AND pub.cid = conf.cid AND conf.name LIKE 'VLDB' AND org.name LIKE `Tel Aviv University';",
    8: "SELECT conf.name FROM org, author, writes, conf, pub, WHERE org.oid = author.oid AND author.aid = writes.aid AND writes.pid = pub.pid AND conf.cid = pub.cid AND pub.year = 2005;",
    9: "SELECT pub.year FROM author, writes, org, pub WHERE author.aid = writes.aid AND author.oid = org.oid AND writes.pid = pub.pid AND org.name LIKE `IBM';",
}


def mas_query(number: int, dropped: list | None = None) -> ConjunctiveQuery:
    from .querytext import parse_sql

    return parse_sql(MAS_QUERIES[number], mas_schema(), on_range="drop", dropped=dropped)


def example_from_query(q: ConjunctiveQuery, d: Instance, rows: int = 2) -> ProvExample:
    """Prov-example of ``rows`` outputs of ``q`` with their full lineage.

    Picks the outputs with the smallest lineage, ties broken by output value.
    """
    results = evaluate(q, d)
    lineages = {o: frozenset().union(*(a.annotations() for a in asg)) for o, asg in results.items()}
    chosen = sorted(lineages, key=lambda o: (len(lineages[o]), values_key(o)))[:rows]
    if len(chosen) < rows:
        raise ValueError(f"query has only {len(chosen)} outputs on this instance")
    chosen.sort(key=values_key)
    return ProvExample(tuple(ProvRow(lineages[o], o) for o in chosen))


def describe(ex: ProvExample) -> str:
    return "\n".join(
        f"{row.output}: {' '.join(sorted(row.explanation, key=natural_key))}" for row in ex.rows
    )
