"""Command-line front end.

Exit codes::

    0  query produced / consistent verdict
    1  inconsistent verdict (check)
    2  usage error, including an empty example file
    3  unreadable or malformed input (schema, instance, example, query)
    4  a value matched no tuple above the similarity threshold
    5  joinless explanation could not be completed from the instance
    6  explanation gap wider than one join tuple
    7  some output position has no projecting attribute
    8  no consistent query within the size bounds
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .completion import complete_example
from .errors import (
    FormatError,
    IncompletableExplanationError,
    InvalidQueryError,
    MissingTupleError,
    NoConsistentQueryError,
    NoProjectionError,
    ProvQBEError,
    QueryParseError,
    SchemaError,
    UnmatchedValueError,
    UnsupportedFragmentError,
)
from .formats import ExampleRow, dumps, example_rows_to_dict, load_example_rows, load_instance, load_schema
from .infer import (
    check_consistent,
    format_timings,
    infer_from_rows,
    map_example_rows,
    minimal_size,
)
from .querytext import parse_datalog, parse_sql, render_query
from .relcore import natural_key
from .valuemap import DEFAULT_THRESHOLD, best_match, mapping_report

EXIT_OK = 0
EXIT_INCONSISTENT = 1
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_UNMATCHED = 4
EXIT_INCOMPLETABLE = 5
EXIT_UNSUPPORTED = 6
EXIT_NO_PROJECTION = 7
EXIT_NO_QUERY = 8

_CODES = (
    (UnmatchedValueError, EXIT_UNMATCHED),
    (IncompletableExplanationError, EXIT_INCOMPLETABLE),
    (UnsupportedFragmentError, EXIT_UNSUPPORTED),
    (NoProjectionError, EXIT_NO_PROJECTION),
    (NoConsistentQueryError, EXIT_NO_QUERY),
    (FormatError, EXIT_FORMAT),
    (QueryParseError, EXIT_FORMAT),
    (InvalidQueryError, EXIT_FORMAT),
    (MissingTupleError, EXIT_FORMAT),
    (SchemaError, EXIT_FORMAT),
)


class UsageError(Exception):
    pass


def _threshold(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 <= x <= 1.0:
        raise argparse.ArgumentTypeError("threshold must lie in [0, 1]")
    return x


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--schema", required=True, help="schema document (JSON)")
    shared.add_argument("--instance", required=True, help="instance document (JSON)")
    shared.add_argument("--example", required=True, help="prov-example document (JSON)")
    shared.add_argument("--joinless", action="store_true", help="explanations omit pure join tuples")
    shared.add_argument(
        "--sim-threshold", type=_threshold, default=DEFAULT_THRESHOLD, help="minimum value-match score"
    )

    parser = argparse.ArgumentParser(prog="provqbe", description="Infer conjunctive queries from explained examples.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infer", parents=[shared], help="infer a minimal consistent query")
    p.add_argument("--style", choices=("datalog", "sql"), default="datalog")
    p.add_argument("--timings", action="store_true", help="print per-stage durations after the query")
    p.add_argument("--max-nodes", type=_positive, default=None, help="cap on join graph size")

    sub.add_parser("map-values", parents=[shared], help="report the tuple each value maps to")

    p = sub.add_parser("complete", parents=[shared], help="add missing join tuples to explanations")
    p.add_argument("--output", help="write the completed example here instead of stdout")

    p = sub.add_parser("check", parents=[shared], help="check a query against the example")
    p.add_argument("--query", required=True, help="file holding a datalog rule or a SQL query")
    p.add_argument("--max-nodes", type=_positive, default=None, help="cap for the minimality search")
    return parser


def _load(args):
    path = Path(args.example)
    if path.is_file() and not path.read_text(encoding="utf-8").strip():
        raise UsageError(f"{args.example} is empty")
    schema = load_schema(args.schema)
    d = load_instance(args.instance, schema)
    rows = load_example_rows(args.example)
    return schema, d, rows


def cmd_infer(args, out) -> int:
    schema, d, rows = _load(args)
    if not rows:
        raise UsageError(f"{args.example} has no rows")
    mode = "joinless" if args.joinless else "full"
    result = infer_from_rows(rows, d, schema, mode, args.sim_threshold, args.max_nodes)
    out.write(render_query(result.query, args.style, schema) + "\n")
    if args.timings:
        out.write("\n" + format_timings(result.stage_timings))
    return EXIT_OK


def cmd_map_values(args, out) -> int:
    _, d, rows = _load(args)
    matches, missing = [], False
    for row in rows:
        for v in row.values or ():
            m = best_match(v, d)
            if m is None:
                out.write(mapping_report(matches, d, args.sim_threshold))
                out.write(f"{v}\t-\t0.0000\t-\tunmatched\n")
                matches, missing = [], True
            else:
                matches.append(m)
    out.write(mapping_report(matches, d, args.sim_threshold))
    if missing or any(m.score < args.sim_threshold for m in matches):
        return EXIT_UNMATCHED
    return EXIT_OK


def cmd_complete(args, out) -> int:
    schema, d, rows = _load(args)
    if not rows:
        raise UsageError(f"{args.example} has no rows")
    ex, _ = map_example_rows(rows, d, args.sim_threshold)
    ex.validate(d)
    completed, added = complete_example(ex, d, schema)
    resolved = []
    for row, original, extra in zip(completed.rows, rows, added):
        if original.is_values:
            ids = tuple(sorted(row.explanation - extra, key=natural_key))
        else:
            ids = tuple(original.tuple_ids)
        resolved.append(ExampleRow(row.output, tuple_ids=ids + tuple(sorted(extra, key=natural_key))))
    text = dumps(example_rows_to_dict(resolved))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    return EXIT_OK


def _read_query(path, schema):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from exc
    if text.lstrip().upper().startswith("SELECT"):
        return parse_sql(text, schema, on_range="error")
    return parse_datalog(text)


def cmd_check(args, out) -> int:
    schema, d, rows = _load(args)
    if not rows:
        raise UsageError(f"{args.example} has no rows")
    q = _read_query(args.query, schema)
    ex, _ = map_example_rows(rows, d, args.sim_threshold)
    ex.validate(d)
    if args.joinless:
        ex, _ = complete_example(ex, d, schema)
    if not check_consistent(q, ex, d, schema):
        out.write("inconsistent\n")
        return EXIT_INCONSISTENT
    out.write("consistent\n")
    try:
        best = minimal_size(ex, d, schema, max_nodes=len(q.atoms))
    except NoConsistentQueryError:
        best = None
    if best is not None and best < len(q.atoms):
        out.write(f"note: not minimal; a consistent query with {best} atoms exists (this one has {len(q.atoms)})\n")
    return EXIT_OK


COMMANDS = {"infer": cmd_infer, "map-values": cmd_map_values, "complete": cmd_complete, "check": cmd_check}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        err.write(f"provqbe: usage error: {exc}\n")
        return EXIT_USAGE
    except ProvQBEError as exc:
        for kind, code in _CODES:
            if isinstance(exc, kind):
                err.write(f"provqbe: {exc}\n")
                return code
        err.write(f"provqbe: {exc}\n")
        return EXIT_FORMAT


if __name__ == "__main__":
    sys.exit(main())
