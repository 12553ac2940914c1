"""Hot kernels with a compiled backend and a pure-Python fallback.

The compiled module is used when it was built and ``PROVQBE_PURE_PYTHON`` is
unset; both expose the same functions with identical results.
"""

import os

from . import _pykernels as python_backend

compiled_backend = None
if not os.environ.get("PROVQBE_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

_active = compiled_backend or python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

levenshtein = _active.levenshtein
solve_csp = _active.solve_csp

__all__ = ["BACKEND", "levenshtein", "solve_csp", "python_backend", "compiled_backend"]
