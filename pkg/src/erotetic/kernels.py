"""Backend selection for the evaluation kernel.

The compiled extension is used when it was built; otherwise the pure-Python
implementation.  Setting EROTETIC_PURE_PYTHON=1 forces the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py
from ._program import Program

if os.environ.get("EROTETIC_PURE_PYTHON", "") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKENDS = {"python": _kernels_py.truth_table}
if _compiled is not None:
    BACKENDS["cython"] = _compiled.truth_table

BACKEND = "cython" if _compiled is not None else "python"


def truth_table(prog: Program, n: int, ptabs: np.ndarray, ftabs: np.ndarray,
                backend: str | None = None) -> np.ndarray:
    """Evaluate `prog` in every row of (ptabs, ftabs); see `_kernels.truth_table`."""
    fn = BACKENDS[backend or BACKEND]
    return fn(prog.op, prog.a0, prog.a1, prog.a2, prog.argv, prog.root, prog.nslots,
              len(prog.free), n,
              np.ascontiguousarray(ptabs, dtype=np.uint8),
              np.ascontiguousarray(ftabs, dtype=np.int32))
