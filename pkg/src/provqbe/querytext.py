"""Datalog and SQL text for conjunctive queries.

Datalog style::

    q(cname, aname) :- author(aid, aname, oid), writes(aid, wid), oname = 'TAU'

SQL support is limited to ``SELECT .. FROM .. WHERE`` with a conjunction of
equalities (``LIKE`` without wildcards counts as equality).
"""

from __future__ import annotations

import re
from collections import defaultdict

from .errors import QueryParseError
from .relcore import Atom, ConjunctiveQuery, Schema, Var, is_integer

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<arrow>:-)
      | (?P<int>-?\d+)
      | (?P<str>'(?:[^']|'')*'|`[^'`]*'|"(?:[^"]|"")*")
      | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<punct>[(),=])
    )""",
    re.VERBOSE,
)


def format_constant(value) -> str:
    if is_integer(value):
        return str(value)
    return "'" + str(value).replace("'", "''") + "'"


def _unquote(tok: str) -> str:
    if tok[0] == "`":
        return tok[1:-1]
    q = tok[0]
    return tok[1:-1].replace(q + q, q)


def _tokenize(text: str):
    pos = 0
    out = []
    text = text.strip().rstrip(".")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise QueryParseError(f"unexpected input at offset {pos}: {text[pos:pos + 20]!r}")
        kind = m.lastgroup
        tok = m.group(kind)
        if kind == "int":
            out.append(("const", int(tok)))
        elif kind == "str":
            out.append(("const", _unquote(tok)))
        else:
            out.append((kind, tok))
        pos = m.end()
    return out


def render_datalog(q: ConjunctiveQuery) -> str:
    def term(t):
        return t.name if isinstance(t, Var) else format_constant(t)

    head = f"{q.name}({', '.join(v.name for v in q.head)})"
    body = [f"{a.relation}({', '.join(term(t) for t in a.terms)})" for a in q.atoms]
    body += [f"{v.name} = {format_constant(c)}" for v, c in q.selections]
    return f"{head} :- {', '.join(body)}"


def parse_datalog(text: str) -> ConjunctiveQuery:
    toks = _tokenize(text)
    i = 0

    def expect(kind, value=None):
        nonlocal i
        if i >= len(toks):
            raise QueryParseError(f"unexpected end of query, expected {value or kind}")
        k, v = toks[i]
        if k != kind or (value is not None and v != value):
            raise QueryParseError(f"expected {value or kind}, got {v!r}")
        i += 1
        return v

    def peek():
        return toks[i] if i < len(toks) else (None, None)

    name = expect("ident")
    expect("punct", "(")
    head = []
    if peek() != ("punct", ")"):
        while True:
            head.append(Var(expect("ident")))
            if peek() == ("punct", ","):
                i += 1
                continue
            break
    expect("punct", ")")
    expect("arrow")
    atoms, selections = [], []
    while True:
        ident = expect("ident")
        k, v = peek()
        if (k, v) == ("punct", "("):
            i += 1
            terms = []
            while True:
                k, v = peek()
                if k == "ident":
                    terms.append(Var(v))
                elif k == "const":
                    terms.append(v)
                else:
                    raise QueryParseError(f"bad term {v!r} in atom {ident}")
                i += 1
                if peek() == ("punct", ","):
                    i += 1
                    continue
                break
            expect("punct", ")")
            atoms.append(Atom(ident, tuple(terms)))
        elif (k, v) == ("punct", "="):
            i += 1
            selections.append((Var(ident), expect("const")))
        else:
            raise QueryParseError(f"expected atom or selection after {ident!r}")
        if peek() == ("punct", ","):
            i += 1
            continue
        break
    if i != len(toks):
        raise QueryParseError(f"trailing input: {toks[i][1]!r}")
    if not atoms:
        raise QueryParseError("query has no atoms")
    return ConjunctiveQuery(tuple(head), tuple(atoms), tuple(selections), name)


def occurrences(q: ConjunctiveQuery) -> dict:
    """Variable -> list of (atom index, attribute index), in atom order."""
    occ = defaultdict(list)
    for ai, atom in enumerate(q.atoms):
        for ti, t in enumerate(atom.terms):
            if isinstance(t, Var):
                occ[t].append((ai, ti))
    return occ


def _aliases(q: ConjunctiveQuery) -> list[str]:
    counts = defaultdict(int)
    for a in q.atoms:
        counts[a.relation] += 1
    seen = defaultdict(int)
    out = []
    for a in q.atoms:
        if counts[a.relation] == 1:
            out.append(a.relation)
        else:
            seen[a.relation] += 1
            out.append(f"{a.relation}{seen[a.relation]}")
    return out


def render_sql(q: ConjunctiveQuery, schema: Schema) -> str:
    aliases = _aliases(q)

    def col(ai, ti):
        return f"{aliases[ai]}.{schema.relation(q.atoms[ai].relation).attr_names[ti]}"

    occ = occurrences(q)
    select = ", ".join(col(*occ[v][0]) for v in q.head) or "1"
    tables = []
    for alias, atom in zip(aliases, q.atoms):
        tables.append(atom.relation if alias == atom.relation else f"{atom.relation} AS {alias}")
    conds = []
    for v, places in occ.items():
        for a, b in zip(places, places[1:]):
            conds.append(f"{col(*a)} = {col(*b)}")
    for ai, atom in enumerate(q.atoms):
        for ti, t in enumerate(atom.terms):
            if not isinstance(t, Var):
                conds.append(f"{col(ai, ti)} = {format_constant(t)}")
    for v, c in q.selections:
        conds.append(f"{col(*occ[v][0])} = {format_constant(c)}")
    text = f"SELECT {select} FROM {', '.join(tables)}"
    if conds:
        text += " WHERE " + " AND ".join(conds)
    return text + ";"


def render_query(q: ConjunctiveQuery, style: str = "datalog", schema: Schema | None = None) -> str:
    if style == "datalog":
        return render_datalog(q)
    if style == "sql":
        if schema is None:
            raise ValueError("SQL rendering needs the schema for attribute names")
        return render_sql(q, schema)
    raise ValueError(f"unknown query style {style!r}")


def name_classes(classes, relation_of, schema: Schema | None) -> list[str]:
    """Readable variable names for slot classes.

    ``classes`` is a list of slot lists ``[(node, attr_index), ...]``; with a
    schema each class is named after the attribute of its first slot, and
    clashing names are numbered (``wid1``, ``wid2``).
    """
    if schema is None:
        return [f"x{i}" for i in range(len(classes))]
    base = [schema.relation(relation_of(slots[0][0])).attr_names[slots[0][1]] for slots in classes]
    counts = defaultdict(int)
    for b in base:
        counts[b] += 1
    seen = defaultdict(int)
    names = []
    taken = {b for b in base if counts[b] == 1}
    for b in base:
        if counts[b] == 1:
            names.append(b)
            continue
        while True:
            seen[b] += 1
            candidate = f"{b}{seen[b]}"
            if candidate not in taken:
                break
        taken.add(candidate)
        names.append(candidate)
    return names


_SQL = re.compile(
    r"^\s*SELECT\s+(?P<select>.+?)\s+FROM\s+(?P<from>.+?)(?:\s+WHERE\s+(?P<where>.+?))?\s*;?\s*$",
    re.IGNORECASE | re.DOTALL,
)
_COND = re.compile(
    r"^\s*(?P<lhs>\w+\.\w+)\s*(?P<op>=|<>|!=|<=|>=|<|>|LIKE)\s*(?P<rhs>\w+\.\w+|-?\d+|'(?:[^']|'')*'|`[^'`]*'|\"[^\"]*\")\s*$",
    re.IGNORECASE,
)


def parse_sql(text: str, schema: Schema, on_range: str = "drop", dropped: list | None = None) -> ConjunctiveQuery:
    """Parse a conjunctive SELECT-FROM-WHERE query.

    Range predicates are outside the query class: ``on_range="drop"`` removes
    them (appending their text to ``dropped``), ``"error"`` raises.
    """
    m = _SQL.match(text)
    if not m:
        raise QueryParseError("not a SELECT ... FROM ... [WHERE ...] query")
    alias_rel = {}
    order = []
    for item in m.group("from").split(","):
        parts = item.split()
        if not parts:
            continue
        if len(parts) == 1:
            rel, alias = parts[0], parts[0]
        elif len(parts) == 2:
            rel, alias = parts
        elif len(parts) == 3 and parts[1].upper() == "AS":
            rel, alias = parts[0], parts[2]
        else:
            raise QueryParseError(f"cannot read FROM item {item.strip()!r}")
        if rel not in schema:
            raise QueryParseError(f"unknown relation {rel!r}")
        if alias in alias_rel:
            raise QueryParseError(f"duplicate alias {alias!r}")
        alias_rel[alias] = rel
        order.append(alias)

    def slot(ref):
        alias, attr = ref.split(".")
        if alias not in alias_rel:
            raise QueryParseError(f"unknown alias {alias!r}")
        return order.index(alias), schema.relation(alias_rel[alias]).index(attr)

    parent = {}

    def find(s):
        parent.setdefault(s, s)
        while parent[s] != s:
            parent[s] = parent[parent[s]]
            s = parent[s]
        return s

    consts = []
    where = m.group("where")
    for cond in re.split(r"\s+AND\s+", where, flags=re.IGNORECASE) if where else []:
        c = _COND.match(cond)
        if not c:
            raise QueryParseError(f"unsupported condition {cond.strip()!r}")
        op = c.group("op").upper()
        lhs, rhs = c.group("lhs"), c.group("rhs")
        is_ref = re.fullmatch(r"\w+\.\w+", rhs) and not rhs.lstrip("-").isdigit()
        if op not in ("=", "LIKE"):
            if on_range == "error":
                raise QueryParseError(f"range predicate {cond.strip()!r} is not conjunctive-equality")
            if dropped is not None:
                dropped.append(cond.strip())
            continue
        if is_ref:
            parent[find(slot(lhs))] = find(slot(rhs))
        else:
            value = int(rhs) if rhs.lstrip("-").isdigit() else _unquote(rhs)
            if op == "LIKE" and isinstance(value, str) and "%" in value:
                raise QueryParseError(f"LIKE pattern {value!r} with wildcards is not an equality")
            consts.append((slot(lhs), value))
    head_slots = [slot(ref.strip()) for ref in m.group("select").split(",")]

    all_slots = [
        (ai, ti) for ai, alias in enumerate(order) for ti in range(schema.relation(alias_rel[alias]).arity)
    ]
    classes = {}
    for s in all_slots:
        classes.setdefault(find(s), []).append(s)
    class_list = list(classes.values())
    names = name_classes(class_list, lambda ai: alias_rel[order[ai]], schema)
    var_of = {}
    for slots, name in zip(class_list, names):
        for s in slots:
            var_of[s] = Var(name)
    atoms = []
    for ai, alias in enumerate(order):
        arity = schema.relation(alias_rel[alias]).arity
        atoms.append(Atom(alias_rel[alias], tuple(var_of[(ai, ti)] for ti in range(arity))))
    selections = []
    for s, value in consts:
        sel = (var_of[s], value)
        if sel not in selections:
            selections.append(sel)
    return ConjunctiveQuery(tuple(var_of[s] for s in head_slots), tuple(atoms), tuple(selections))
