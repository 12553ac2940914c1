"""Pure-Python kernels; the reference the compiled module must agree with."""


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        row = [i]
        for j, cb in enumerate(b, 1):
            row.append(min(row[j - 1] + 1, prev[j] + 1, prev[j - 1] + (ca != cb)))
        prev = row
    return prev[-1]


def solve_csp(domain_sizes, constraints, limit=0):
    """All solutions of a binary CSP, in lexicographic order of value indices.

    ``constraints[k]`` lists ``(e, matrix)`` with ``e < k``; value ``c`` of
    variable ``k`` is allowed only if ``matrix[sol[e]][c]`` is truthy.
    ``limit > 0`` stops after that many solutions.
    """
    n = len(domain_sizes)
    cons = [[(e, [list(map(bool, row)) for row in m]) for e, m in constraints[k]] for k in range(n)]
    sol = [0] * n
    out = []

    def extend(k):
        if k == n:
            out.append(tuple(sol))
            return limit > 0 and len(out) >= limit
        checks = cons[k]
        for c in range(domain_sizes[k]):
            for e, m in checks:
                if not m[sol[e]][c]:
                    break
            else:
                sol[k] = c
                if extend(k + 1):
                    return True
        return False

    extend(0)
    return out
