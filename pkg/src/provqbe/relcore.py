"""Embedded relational model: schemas, annotated instances, conjunctive queries.

Constants are typed (``int`` for integer attributes, ``str`` for text ones)
and equality never crosses types, so ``4`` and ``"4"`` do not join.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import InvalidQueryError, NotAnOutputError, SchemaError

TEXT = "text"
INTEGER = "integer"
VALUE_TYPES = (TEXT, INTEGER)

_DIGITS = re.compile(r"(\d+)")


def natural_key(annotation: str):
    """Sort key putting ``p2`` before ``p10``."""
    parts = tuple(int(c) if c.isdigit() else c for c in _DIGITS.split(annotation))
    return parts, annotation


def value_key(value):
    # integers sort before text; the two never compare directly
    return (0, value, "") if isinstance(value, int) else (1, 0, value)


def values_key(values):
    return tuple(value_key(v) for v in values)


def is_integer(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def matches_type(value, value_type: str) -> bool:
    if value_type == INTEGER:
        return is_integer(value)
    return isinstance(value, str)


@dataclass(frozen=True)
class RelationDecl:
    name: str
    attributes: tuple[tuple[str, str], ...]
    key: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple((a, t) for a, t in self.attributes))
        object.__setattr__(self, "key", tuple(self.key))
        names = self.attr_names
        if len(set(names)) != len(names):
            raise SchemaError(f"duplicate attribute name in relation {self.name}")
        for attr, vtype in self.attributes:
            if vtype not in VALUE_TYPES:
                raise SchemaError(f"{self.name}.{attr}: unknown type {vtype!r}")
        for k in self.key:
            if k not in names:
                raise SchemaError(f"{self.name}: key attribute {k!r} is not an attribute")

    @property
    def attr_names(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.attributes)

    @property
    def arity(self) -> int:
        return len(self.attributes)

    def index(self, attr: str) -> int:
        try:
            return self.attr_names.index(attr)
        except ValueError:
            raise SchemaError(f"relation {self.name} has no attribute {attr!r}") from None

    def type_of(self, index: int) -> str:
        return self.attributes[index][1]

    def key_indices(self) -> tuple[int, ...]:
        return tuple(self.index(k) for k in self.key)


@dataclass(frozen=True)
class ForeignKey:
    from_relation: str
    from_attr: str
    to_relation: str
    to_attr: str

    def __str__(self):
        return f"{self.from_relation}.{self.from_attr} -> {self.to_relation}.{self.to_attr}"


@dataclass(frozen=True)
class Schema:
    relations: tuple[RelationDecl, ...]
    foreign_keys: tuple[ForeignKey, ...] = ()
    _by_name: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(self, "foreign_keys", tuple(self.foreign_keys))
        by_name = {}
        for rel in self.relations:
            if rel.name in by_name:
                raise SchemaError(f"duplicate relation {rel.name}")
            by_name[rel.name] = rel
        object.__setattr__(self, "_by_name", by_name)
        for fk in self.foreign_keys:
            for rel, attr in ((fk.from_relation, fk.from_attr), (fk.to_relation, fk.to_attr)):
                if rel not in by_name:
                    raise SchemaError(f"foreign key {fk} names unknown relation {rel}")
                by_name[rel].index(attr)

    def __contains__(self, name) -> bool:
        return name in self._by_name

    def relation(self, name: str) -> RelationDecl:
        try:
            return self._by_name[name]
        except KeyError:
            raise SchemaError(f"unknown relation {name!r}") from None

    @property
    def relation_names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.relations)

    def fk_index_pairs(self) -> frozenset:
        """Foreign-key links as unordered ``{(relation, attr_index), ...}`` pairs."""
        pairs = set()
        for fk in self.foreign_keys:
            a = (fk.from_relation, self.relation(fk.from_relation).index(fk.from_attr))
            b = (fk.to_relation, self.relation(fk.to_relation).index(fk.to_attr))
            pairs.add(frozenset((a, b)))
        return frozenset(pairs)

    def graph(self) -> dict[str, set[str]]:
        """Schema graph: relations as nodes, an edge per foreign-key link."""
        adj = {r.name: set() for r in self.relations}
        for fk in self.foreign_keys:
            adj[fk.from_relation].add(fk.to_relation)
            adj[fk.to_relation].add(fk.from_relation)
        return adj


@dataclass(frozen=True)
class AnnotatedTuple:
    annotation: str
    relation: str
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def __getitem__(self, index):
        return self.values[index]

    def __len__(self):
        return len(self.values)


class Instance:
    """Annotated relational instance; read-only once built."""

    def __init__(self, schema: Schema, tuples: Iterable[AnnotatedTuple]):
        self.schema = schema
        by_ann = {}
        by_rel = {name: [] for name in schema.relation_names}
        for t in tuples:
            if t.relation not in schema:
                raise SchemaError(f"tuple {t.annotation} belongs to unknown relation {t.relation}")
            decl = schema.relation(t.relation)
            if len(t.values) != decl.arity:
                raise SchemaError(
                    f"tuple {t.annotation} has {len(t.values)} values, {t.relation} has arity {decl.arity}"
                )
            for i, v in enumerate(t.values):
                if not matches_type(v, decl.type_of(i)):
                    raise SchemaError(
                        f"tuple {t.annotation}: value {v!r} does not match type "
                        f"{decl.type_of(i)} of {t.relation}.{decl.attr_names[i]}"
                    )
            if t.annotation in by_ann:
                raise SchemaError(f"duplicate annotation {t.annotation}")
            by_ann[t.annotation] = t
            by_rel[t.relation].append(t)
        self._tuples = {a: by_ann[a] for a in sorted(by_ann, key=natural_key)}
        self._by_rel = {
            name: tuple(sorted(ts, key=lambda t: natural_key(t.annotation)))
            for name, ts in by_rel.items()
        }

    def __getitem__(self, annotation: str) -> AnnotatedTuple:
        return self._tuples[annotation]

    def __contains__(self, annotation) -> bool:
        return annotation in self._tuples

    def __len__(self):
        return len(self._tuples)

    def __iter__(self) -> Iterator[AnnotatedTuple]:
        """Tuples in schema relation order, then by annotation."""
        for name in self.schema.relation_names:
            yield from self._by_rel[name]

    @property
    def annotations(self) -> tuple[str, ...]:
        return tuple(self._tuples)

    def tuples_of(self, relation: str) -> tuple[AnnotatedTuple, ...]:
        return self._by_rel.get(relation, ())

    def restrict(self, annotations: Iterable[str]) -> "Instance":
        keep = set(annotations)
        return Instance(self.schema, (t for t in self._tuples.values() if t.annotation in keep))

    def __repr__(self):
        return f"Instance({len(self)} tuples over {len(self.schema.relations)} relations)"


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __str__(self):
        return self.name


Term = Union[Var, int, str]


@dataclass(frozen=True)
class Atom:
    relation: str
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def variables(self):
        return [t for t in self.terms if isinstance(t, Var)]


@dataclass(frozen=True)
class ConjunctiveQuery:
    head: tuple[Var, ...]
    atoms: tuple[Atom, ...]
    selections: tuple[tuple[Var, object], ...] = ()
    name: str = "q"

    def __post_init__(self):
        object.__setattr__(self, "head", tuple(self.head))
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "selections", tuple((v, c) for v, c in self.selections))
        seen = {v for a in self.atoms for v in a.variables()}
        for v in self.head:
            if v not in seen:
                raise InvalidQueryError(f"head variable {v} does not occur in any atom")
        for v, _ in self.selections:
            if v not in seen:
                raise InvalidQueryError(f"selection variable {v} does not occur in any atom")

    def variables(self) -> list[Var]:
        out = []
        for a in self.atoms:
            for v in a.variables():
                if v not in out:
                    out.append(v)
        return out

    def validate(self, schema: Schema) -> None:
        for a in self.atoms:
            if a.relation not in schema:
                raise InvalidQueryError(f"unknown relation {a.relation!r}")
            decl = schema.relation(a.relation)
            if len(a.terms) != decl.arity:
                raise InvalidQueryError(
                    f"atom {a.relation} has {len(a.terms)} terms, relation has arity {decl.arity}"
                )

    def with_selections(self, selections) -> "ConjunctiveQuery":
        return ConjunctiveQuery(self.head, self.atoms, tuple(selections), self.name)

    def __str__(self):
        from .querytext import render_datalog

        return render_datalog(self)


@dataclass(frozen=True)
class Assignment:
    """Atom index -> annotation of the tuple that atom is mapped to."""

    mapping: tuple[str, ...]

    def annotations(self) -> frozenset:
        return frozenset(self.mapping)


def _assignments(q: ConjunctiveQuery, d: Instance) -> Iterator[tuple[tuple, Assignment]]:
    fixed = {}
    for v, c in q.selections:
        if v in fixed and fixed[v] != c:
            return
        fixed[v] = c
    pools = [d.tuples_of(a.relation) for a in q.atoms]
    chosen = [None] * len(q.atoms)
    binding = dict(fixed)

    def extend(k):
        if k == len(q.atoms):
            out = tuple(binding[v] for v in q.head)
            yield out, Assignment(tuple(chosen))
            return
        atom = q.atoms[k]
        for t in pools[k]:
            added = []
            ok = True
            for term, value in zip(atom.terms, t.values):
                if isinstance(term, Var):
                    bound = binding.get(term, _UNBOUND)
                    if bound is _UNBOUND:
                        binding[term] = value
                        added.append(term)
                    elif not _same(bound, value):
                        ok = False
                        break
                elif not _same(term, value):
                    ok = False
                    break
            if ok:
                chosen[k] = t.annotation
                yield from extend(k + 1)
            for v in added:
                del binding[v]

    yield from extend(0)


_UNBOUND = object()


def _same(a, b) -> bool:
    return type(a) is type(b) and a == b


def evaluate(q: ConjunctiveQuery, d: Instance) -> dict[tuple, frozenset]:
    """Every output of ``q`` on ``d`` with the full set of assignments deriving it.

    Outputs are ordered lexicographically on their values.
    """
    q.validate(d.schema)
    grouped: dict[tuple, set] = {}
    for out, asg in _assignments(q, d):
        grouped.setdefault(out, set()).add(asg)
    return {o: frozenset(grouped[o]) for o in sorted(grouped, key=values_key)}


def lineage(q: ConjunctiveQuery, d: Instance, output) -> frozenset:
    """Annotations of all input tuples used by any assignment producing ``output``."""
    output = tuple(output)
    results = evaluate(q, d)
    if output not in results:
        raise NotAnOutputError(f"{output} is not an output of the query on this instance")
    return frozenset().union(*(a.annotations() for a in results[output]))


def check_assignment(q: ConjunctiveQuery, d: Instance, asg: Assignment) -> bool:
    """Re-validate an assignment against the query and instance from scratch."""
    if len(asg.mapping) != len(q.atoms):
        return False
    binding = {}
    for atom, ann in zip(q.atoms, asg.mapping):
        if ann not in d:
            return False
        t = d[ann]
        if t.relation != atom.relation:
            return False
        for term, value in zip(atom.terms, t.values):
            if isinstance(term, Var):
                if term in binding and not _same(binding[term], value):
                    return False
                binding[term] = value
            elif not _same(term, value):
                return False
    return all(_same(binding[v], c) for v, c in q.selections)
