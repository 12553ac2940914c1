# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: edit distance and binary-CSP backtracking."""

from libc.stdlib cimport malloc, free

import numpy as np


def levenshtein(str a, str b):
    cdef Py_ssize_t n, m, i, j
    cdef int *prev
    cdef int *row
    cdef int *tmp
    cdef int best, cost
    if len(a) < len(b):
        a, b = b, a
    n = len(a)
    m = len(b)
    prev = <int *> malloc((m + 1) * sizeof(int))
    row = <int *> malloc((m + 1) * sizeof(int))
    if prev == NULL or row == NULL:
        free(prev)
        free(row)
        raise MemoryError()
    try:
        for j in range(m + 1):
            prev[j] = j
        for i in range(1, n + 1):
            row[0] = i
            for j in range(1, m + 1):
                cost = 0 if a[i - 1] == b[j - 1] else 1
                best = prev[j - 1] + cost
                if row[j - 1] + 1 < best:
                    best = row[j - 1] + 1
                if prev[j] + 1 < best:
                    best = prev[j] + 1
                row[j] = best
            tmp = prev
            prev = row
            row = tmp
        return prev[m]
    finally:
        free(prev)
        free(row)


def solve_csp(domain_sizes, constraints, long limit=0):
    n = len(domain_sizes)
    if n == 0:
        return [()]
    starts, stops, cvars, offsets, strides = [], [], [], [], []
    blocks = []
    total = 0
    for k in range(n):
        starts.append(len(cvars))
        for e, m in constraints[k]:
            arr = np.ascontiguousarray(m, dtype=np.uint8).reshape(-1)
            cvars.append(e)
            offsets.append(total)
            strides.append(domain_sizes[k])
            blocks.append(arr)
            total += arr.shape[0]
        stops.append(len(cvars))
    buf = np.concatenate(blocks) if blocks else np.zeros(1, dtype=np.uint8)
    return _search(
        buf,
        np.asarray(domain_sizes, dtype=np.intc),
        np.asarray(starts, dtype=np.intc),
        np.asarray(stops, dtype=np.intc),
        np.asarray(cvars or [0], dtype=np.intc),
        np.asarray(offsets or [0], dtype=np.int64),
        np.asarray(strides or [0], dtype=np.int64),
        limit,
    )


cdef list _search(
    const unsigned char[::1] buf,
    const int[::1] dom,
    const int[::1] cstart,
    const int[::1] cstop,
    const int[::1] cvar,
    const long long[::1] coff,
    const long long[::1] cstride,
    long limit,
):
    cdef int n = dom.shape[0]
    cdef int[::1] sol = np.zeros(n, dtype=np.intc)
    cdef int[::1] nxt = np.zeros(n, dtype=np.intc)
    cdef int k = 0
    cdef int c, ci, ok, i
    cdef list out = []
    while k >= 0:
        if k == n:
            out.append(tuple([sol[i] for i in range(n)]))
            if limit > 0 and len(out) >= limit:
                break
            k -= 1
            continue
        c = nxt[k]
        while c < dom[k]:
            ok = 1
            for ci in range(cstart[k], cstop[k]):
                if buf[coff[ci] + sol[cvar[ci]] * cstride[ci] + c] == 0:
                    ok = 0
                    break
            if ok:
                break
            c += 1
        if c < dom[k]:
            sol[k] = c
            nxt[k] = c + 1
            k += 1
            if k < n:
                nxt[k] = 0
        else:
            k -= 1
    return out
