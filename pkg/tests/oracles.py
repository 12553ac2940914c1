"""Brute-force reference implementations used to cross-check the library.

Nothing here shares code with the search-based implementations beyond the
plain data classes.
"""

from __future__ import annotations

import itertools
import random

from provqbe.relcore import (
    INTEGER,
    TEXT,
    AnnotatedTuple,
    Atom,
    ConjunctiveQuery,
    Instance,
    RelationDecl,
    Schema,
    Var,
)


def _eq(a, b):
    return type(a) is type(b) and a == b


def brute_assignments(q: ConjunctiveQuery, d: Instance):
    """Every (output, tuple-annotation-per-atom) pair, by full cartesian product."""
    pools = [d.tuples_of(a.relation) for a in q.atoms]
    sel = {}
    for v, c in q.selections:
        sel.setdefault(v, []).append(c)
    for combo in itertools.product(*pools):
        binding = {}
        ok = True
        for atom, t in zip(q.atoms, combo):
            for term, value in zip(atom.terms, t.values):
                if isinstance(term, Var):
                    if term in binding and not _eq(binding[term], value):
                        ok = False
                        break
                    binding[term] = value
                elif not _eq(term, value):
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        if any(not _eq(binding[v], c) for v, cs in sel.items() for c in cs):
            continue
        yield tuple(binding[v] for v in q.head), tuple(t.annotation for t in combo)


def brute_evaluate(q, d) -> dict:
    out = {}
    for o, anns in brute_assignments(q, d):
        out.setdefault(o, set()).add(anns)
    return out


def brute_lineage(q, d, o) -> frozenset:
    out = set()
    for got, anns in brute_assignments(q, d):
        if got == tuple(o) and all(_eq(x, y) for x, y in zip(got, o)):
            out.update(anns)
    return frozenset(out)


def consistent_by_exhaustion(q, explanation, output, d) -> bool:
    """Consistency by exhaustion: some set S of database tuples outside I makes I part of the lineage.

    An assignment's validity depends only on the tuples it uses, so the
    assignments over ``I ∪ S`` are those over ``d`` whose tuples all lie in
    ``I ∪ S``.  Every subset S is tried; monotonicity is not assumed.
    """
    explanation = frozenset(explanation)
    output = tuple(output)
    if not explanation <= set(d.annotations):
        return False
    hits = [
        frozenset(anns)
        for got, anns in brute_assignments(q, d)
        if len(got) == len(output) and all(_eq(x, y) for x, y in zip(got, output))
    ]
    rest = sorted(set(d.annotations) - explanation)
    for k in range(len(rest) + 1):
        for s in itertools.combinations(rest, k):
            world = explanation | set(s)
            used = set()
            found = False
            for h in hits:
                if h <= world:
                    found = True
                    used |= h
            if found and explanation <= used:
                return True
    return False


def consistent_within_explanation(q, explanation, output, d) -> bool:
    """Consistency when the database is the explanation itself (S must be empty)."""
    return consistent_by_exhaustion(q, explanation, output, d.restrict(explanation))


# random small cases


def random_schema(rng: random.Random, max_relations=5) -> Schema:
    rels = []
    for k in range(rng.randint(1, max_relations)):
        arity = rng.randint(1, 3)
        attrs = tuple((f"a{i}", INTEGER if rng.random() < 0.8 else TEXT) for i in range(arity))
        rels.append(RelationDecl(f"r{k}", attrs, ()))
    return Schema(tuple(rels), ())


def random_instance(rng: random.Random, schema: Schema, max_tuples=15, domain=3) -> Instance:
    tuples = []
    seen = set()
    n = rng.randint(1, max_tuples)
    for k in range(n * 3):
        if len(tuples) >= n:
            break
        decl = rng.choice(schema.relations)
        vals = tuple(
            rng.randint(1, domain) if t == INTEGER else str(rng.randint(1, domain)) for _, t in decl.attributes
        )
        if (decl.name, vals) in seen:
            continue
        seen.add((decl.name, vals))
        tuples.append(AnnotatedTuple(f"t{len(tuples) + 1}", decl.name, vals))
    return Instance(schema, tuples)


def random_query(rng: random.Random, schema: Schema, max_atoms=4) -> ConjunctiveQuery:
    n = rng.randint(1, max_atoms)
    pool = [Var(f"v{i}") for i in range(rng.randint(1, 4))]
    atoms = []
    for _ in range(n):
        decl = rng.choice(schema.relations)
        atoms.append(Atom(decl.name, tuple(rng.choice(pool) for _ in range(decl.arity))))
    used = list(dict.fromkeys(v for a in atoms for v in a.terms))
    head = tuple(rng.sample(used, rng.randint(1, min(2, len(used)))))
    selections = ()
    if rng.random() < 0.25:
        v = rng.choice(used)
        selections = ((v, rng.choice([1, 2, "1"])),)
    return ConjunctiveQuery(head, tuple(atoms), selections)


# candidate enumeration by link subsets


def brute_candidates(rels, schema, per_position, vocabulary):
    """Canonical encodings of every connected candidate over relation list ``rels``.

    Candidates are read off every subset of allowed slot links: the subset's
    union-find classes are the join classes.  Isomorphic candidates collapse
    through a brute-force minimum over same-relation node permutations.
    """
    arities = [schema.relation(r).arity for r in rels]
    slots = [(u, i) for u in range(len(rels)) for i in range(arities[u])]
    links = [
        (s, t)
        for s, t in itertools.combinations(slots, 2)
        if frozenset(((rels[s[0]], s[1]), (rels[t[0]], t[1]))) in vocabulary
    ]
    proj_choices = [
        [(u, i) for u in range(len(rels)) for r, i in options if r == rels[u]] for options in per_position
    ]
    seen = set()
    for k in range(len(links) + 1):
        for subset in itertools.combinations(links, k):
            parent = {s: s for s in slots}

            def find(x):
                while parent[x] != x:
                    x = parent[x]
                return x

            for s, t in subset:
                rs, rt = find(s), find(t)
                if rs != rt:
                    parent[max(rs, rt)] = min(rs, rt)
            classes = {}
            for s in slots:
                classes.setdefault(find(s), set()).add(s)
            blocks = [frozenset(b) for b in classes.values() if len(b) > 1]
            # node connectivity through shared classes
            reach = {0}
            grew = True
            while grew:
                grew = False
                for b in blocks:
                    nodes = {s[0] for s in b}
                    if nodes & reach and not nodes <= reach:
                        reach |= nodes
                        grew = True
            if len(reach) != len(rels):
                continue
            for proj in itertools.product(*proj_choices):
                seen.add(_brute_canon(rels, blocks, proj))
    return seen


def _brute_canon(rels, blocks, proj):
    best = None
    n = len(rels)
    for perm in itertools.permutations(range(n)):
        if any(rels[perm[u]] != rels[u] for u in range(n)):
            continue
        enc_blocks = tuple(sorted(tuple(sorted((perm[u], i) for u, i in b)) for b in blocks))
        enc_proj = tuple((perm[u], i) for u, i in proj)
        enc = (enc_blocks, enc_proj)
        if best is None or enc < best:
            best = enc
    return (tuple(rels), best)
