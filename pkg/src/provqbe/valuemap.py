"""Map free-form explanation values to database tuples by cell similarity.

A tuple scores the best similarity of any of its cells against the value.
Text cells use normalized edit similarity, case-insensitively; integer cells
use ``1 / (1 + |x - v|)`` when the value is a plain integer literal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import _kernels
from .errors import UnmatchedValueError
from .relcore import AnnotatedTuple, Instance, is_integer

DEFAULT_THRESHOLD = 0.5

_INT_LITERAL = re.compile(r"-?(0|[1-9][0-9]*)")


def text_similarity(cell: str, value: str) -> float:
    a, b = cell.casefold(), value.casefold()
    if a == b:
        return 1.0
    return 1.0 - _kernels.levenshtein(a, b) / max(len(a), len(b))


def integer_similarity(cell: int, value: str) -> float:
    if not _INT_LITERAL.fullmatch(value):
        return 0.0
    return 1.0 / (1.0 + abs(cell - int(value)))


def default_similarity(cell, value: str) -> float:
    if is_integer(cell):
        return integer_similarity(cell, value)
    return text_similarity(cell, value)


Similarity = Callable[[object, str], float]


def score_tuple(t: AnnotatedTuple, value: str, sim: Similarity = default_similarity) -> tuple[float, int]:
    """Best cell similarity and the lowest attribute index reaching it."""
    best, where = -1.0, 0
    for i, cell in enumerate(t.values):
        s = sim(cell, value)
        if s > best:
            best, where = s, i
    return max(best, 0.0), where


@dataclass(frozen=True)
class ValueMatch:
    value: str
    annotation: str
    score: float
    matched_attr: tuple  # (relation, attr_index)
    exact: bool
    ties: tuple = field(default=(), compare=False)

    def attr_name(self, d: Instance) -> str:
        rel, i = self.matched_attr
        return f"{rel}.{d.schema.relation(rel).attr_names[i]}"


def best_match(value: str, d: Instance, sim: Similarity = default_similarity) -> ValueMatch | None:
    """Highest-scoring tuple for ``value``; the first exact match wins immediately."""
    best = None
    ties = []
    for t in d:
        score, attr = score_tuple(t, value, sim)
        if score >= 1.0:
            return ValueMatch(value, t.annotation, 1.0, (t.relation, attr), True)
        if best is None or score > best.score:
            best = ValueMatch(value, t.annotation, score, (t.relation, attr), False)
            ties = []
        elif score == best.score:
            ties.append(t.annotation)
    if best is not None and ties:
        best = ValueMatch(best.value, best.annotation, best.score, best.matched_attr, False, tuple(ties))
    return best


def map_values(
    values: Sequence[str],
    d: Instance,
    threshold: float = DEFAULT_THRESHOLD,
    sim: Similarity = default_similarity,
) -> list[ValueMatch]:
    out = []
    for v in values:
        m = best_match(v, d, sim)
        if m is None or m.score < threshold:
            raise UnmatchedValueError(v, m)
        out.append(m)
    return out


def mapping_report(matches, d: Instance, threshold: float = DEFAULT_THRESHOLD) -> str:
    """``value TAB annotation TAB score TAB relation.attr TAB exact|fuzzy|unmatched`` lines.

    A sixth ``ties=...`` field appears when other tuples reach the same score.
    """
    lines = []
    for m in matches:
        kind = "exact" if m.exact else ("fuzzy" if m.score >= threshold else "unmatched")
        fields = [m.value, m.annotation, f"{m.score:.4f}", m.attr_name(d), kind]
        if m.ties:
            fields.append("ties=" + ",".join(m.ties))
        lines.append("\t".join(fields))
    return "\n".join(lines) + ("\n" if lines else "")
