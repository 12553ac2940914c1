"""Infer conjunctive queries from output examples explained by their lineage."""

from ._kernels import BACKEND
from .candidates import SizeBounds, enumerate_candidate_graphs, size_bounds
from .completion import complete_example, complete_joinless
from .errors import *  # noqa: F401,F403
from .infer import (
    InferenceResult,
    check_consistent,
    infer_from_rows,
    infer_projection,
    infer_query,
    infer_selections,
    is_minimal,
)
from .joingraph import (
    Cover,
    Homomorphism,
    JoinGraph,
    build_join_graph,
    enumerate_homomorphisms,
    find_cover,
    is_isomorphic,
    to_query,
)
from .provgraph import ProvExample, ProvRow, ProvenanceGraph, build_prov_graph
from .querytext import parse_datalog, parse_sql, render_datalog, render_sql
from .relcore import (
    AnnotatedTuple,
    Atom,
    ConjunctiveQuery,
    ForeignKey,
    Instance,
    RelationDecl,
    Schema,
    Var,
    evaluate,
    lineage,
)
from .valuemap import ValueMatch, map_values

__version__ = "0.1.0"
