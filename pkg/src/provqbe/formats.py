"""Versioned JSON documents for schemas, instances and prov-examples."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import FormatError, ProvQBEError
from .provgraph import ProvExample, ProvRow
from .relcore import AnnotatedTuple, ForeignKey, Instance, RelationDecl, Schema, natural_key

VERSION = 1
SCHEMA_FORMAT = "provqbe-schema"
INSTANCE_FORMAT = "provqbe-instance"
EXAMPLE_FORMAT = "provqbe-prov-example"


def _read(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    if not text.strip():
        raise FormatError(f"{path} is empty")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc


def _check_header(doc, expected: str, where) -> None:
    if not isinstance(doc, dict):
        raise FormatError(f"{where}: top level must be an object")
    if doc.get("format") != expected:
        raise FormatError(f"{where}: expected format {expected!r}, got {doc.get('format')!r}")
    if doc.get("version") != VERSION:
        raise FormatError(f"{where}: unsupported version {doc.get('version')!r}")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def schema_from_dict(doc: dict, where="schema") -> Schema:
    _check_header(doc, SCHEMA_FORMAT, where)
    try:
        rels = [
            RelationDecl(
                r["name"],
                tuple((a["name"], a["type"]) for a in r["attributes"]),
                tuple(r.get("key", ())),
            )
            for r in doc["relations"]
        ]
        fks = []
        for fk in doc.get("foreign_keys", ()):
            fr, fa = fk["from"].split(".")
            tr, ta = fk["to"].split(".")
            fks.append(ForeignKey(fr, fa, tr, ta))
        return Schema(tuple(rels), tuple(fks))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"{where}: malformed schema ({exc})") from exc
    except ProvQBEError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def schema_to_dict(schema: Schema) -> dict:
    return {
        "format": SCHEMA_FORMAT,
        "version": VERSION,
        "relations": [
            {
                "name": r.name,
                "attributes": [{"name": a, "type": t} for a, t in r.attributes],
                "key": list(r.key),
            }
            for r in schema.relations
        ],
        "foreign_keys": [
            {"from": f"{fk.from_relation}.{fk.from_attr}", "to": f"{fk.to_relation}.{fk.to_attr}"}
            for fk in schema.foreign_keys
        ],
    }


def instance_from_dict(doc: dict, schema: Schema, where="instance") -> Instance:
    _check_header(doc, INSTANCE_FORMAT, where)
    tuples = []
    try:
        for rel, rows in doc["relations"].items():
            decl = schema.relation(rel)
            for row in rows:
                extra = set(row) - set(decl.attr_names) - {"annotation"}
                if extra:
                    raise FormatError(f"{where}: {rel} row has unknown fields {sorted(extra)}")
                tuples.append(
                    AnnotatedTuple(row["annotation"], rel, tuple(row[a] for a in decl.attr_names))
                )
        return Instance(schema, tuples)
    except (KeyError, TypeError, AttributeError) as exc:
        raise FormatError(f"{where}: malformed instance ({exc!r})") from exc
    except FormatError:
        raise
    except ProvQBEError as exc:
        raise FormatError(f"{where}: {exc}") from exc


def instance_to_dict(d: Instance) -> dict:
    rels = {}
    for rel in d.schema.relations:
        rels[rel.name] = [
            {"annotation": t.annotation, **dict(zip(rel.attr_names, t.values))} for t in d.tuples_of(rel.name)
        ]
    return {"format": INSTANCE_FORMAT, "version": VERSION, "relations": rels}


@dataclass(frozen=True)
class ExampleRow:
    """A prov-example row as written by the user: tuple ids or free-form values."""

    output: tuple
    tuple_ids: tuple | None = None
    values: tuple | None = None

    @property
    def is_values(self) -> bool:
        return self.values is not None


def example_rows_from_dict(doc: dict, where="prov-example") -> list[ExampleRow]:
    _check_header(doc, EXAMPLE_FORMAT, where)
    rows = doc.get("rows")
    if not isinstance(rows, list):
        raise FormatError(f"{where}: 'rows' must be a list")
    out = []
    for n, row in enumerate(rows):
        if not isinstance(row, dict) or "output" not in row:
            raise FormatError(f"{where}: row {n} has no output")
        has_ids, has_vals = "tuple_ids" in row, "values" in row
        if has_ids == has_vals:
            raise FormatError(f"{where}: row {n} needs exactly one of tuple_ids or values")
        if has_ids:
            out.append(ExampleRow(tuple(row["output"]), tuple_ids=tuple(row["tuple_ids"])))
        else:
            out.append(ExampleRow(tuple(row["output"]), values=tuple(str(v) for v in row["values"])))
    return out


def example_rows_to_dict(rows) -> dict:
    docs = []
    for r in rows:
        if r.is_values:
            docs.append({"output": list(r.output), "values": list(r.values)})
        else:
            docs.append({"output": list(r.output), "tuple_ids": list(r.tuple_ids)})
    return {"format": EXAMPLE_FORMAT, "version": VERSION, "rows": docs}


def example_to_rows(ex: ProvExample) -> list[ExampleRow]:
    return [
        ExampleRow(row.output, tuple_ids=tuple(sorted(row.explanation, key=natural_key))) for row in ex.rows
    ]


def rows_to_example(rows) -> ProvExample:
    if any(r.is_values for r in rows):
        raise ValueError("value rows must be mapped to tuples first")
    return ProvExample(tuple(ProvRow(frozenset(r.tuple_ids), r.output) for r in rows))


def load_schema(path) -> Schema:
    return schema_from_dict(_read(path), str(path))


def load_instance(path, schema: Schema) -> Instance:
    return instance_from_dict(_read(path), schema, str(path))


def load_example_rows(path) -> list[ExampleRow]:
    return example_rows_from_dict(_read(path), str(path))


def save(path, doc: dict) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")
