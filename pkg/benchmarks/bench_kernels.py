"""Compare the compiled and pure-Python kernels.

    python3 benchmarks/bench_kernels.py [--repeat N]

Times edit distance over MAS-style strings, the homomorphism CSP on the
query-6 example, and end-to-end inference under each backend.
"""

import argparse
import random
import statistics
import time

import numpy as np

from provqbe import _kernels, datasets
from provqbe import joingraph, valuemap


def timed(fn, repeat):
    runs = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        runs.append(time.perf_counter() - start)
    return statistics.median(runs)


def lev_workload(backend):
    rng = random.Random(1)
    words = ["Adaptive Query Processing", "Provenance Graph", "SIGMOD", "Tel Aviv University", "Lineage"]
    pairs = [(rng.choice(words), rng.choice(words) + "x" * rng.randrange(3)) for _ in range(2000)]
    return lambda: [backend.levenshtein(a, b) for a, b in pairs]


def csp_workload(backend):
    rng = np.random.default_rng(3)
    sizes = [12] * 6
    constraints = [[]] + [
        [(k - 1, (rng.random((12, 12)) < 0.35).astype(np.uint8))] for k in range(1, 6)
    ]
    return lambda: backend.solve_csp(sizes, constraints)


def with_backend(backend, fn):
    saved = (_kernels.levenshtein, _kernels.solve_csp)
    _kernels.levenshtein, _kernels.solve_csp = backend.levenshtein, backend.solve_csp
    try:
        return fn()
    finally:
        _kernels.levenshtein, _kernels.solve_csp = saved


def inference_workload():
    schema, d = datasets.mas_schema(), datasets.mas_instance()
    ex = datasets.example_from_query(datasets.mas_query(6), d)
    from provqbe.infer import infer_query

    return lambda: infer_query(ex, d, schema)


def mapping_workload():
    d = datasets.mas_instance()
    values = ["Tel Aviv Univrsity", "Provenanse Query Graph", "SIGMD", "Databses", "Alise"]
    return lambda: valuemap.map_values(values, d, threshold=0.0)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args()
    backends = [("python", _kernels.python_backend)]
    if _kernels.compiled_backend is not None:
        backends.append(("cython", _kernels.compiled_backend))
    else:
        print("compiled backend not built; showing pure Python only")
    rows = []
    for label, make in (("levenshtein x2000", lev_workload), ("csp 6x12", csp_workload)):
        rows.append((label, [timed(make(b), args.repeat) for _, b in backends]))
    for label, make in (("map 5 values (MAS)", mapping_workload), ("infer query 6 (MAS)", inference_workload)):
        fn = make()
        rows.append((label, [with_backend(b, lambda: timed(fn, args.repeat)) for _, b in backends]))
    # joingraph binds solve_csp through the package, so patching the package is enough
    assert joingraph._kernels is _kernels
    header = f"{'workload':<24}" + "".join(f"{name:>12}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for label, times in rows:
        line = f"{label:<24}" + "".join(f"{t * 1e3:>10.2f}ms" for t in times)
        if len(times) == 2:
            line += f"{times[0] / times[1]:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
