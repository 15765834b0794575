"""Kernel backend selection.

Prefers the compiled extension; falls back to the numpy implementation when
the extension is missing or ``SHAPEALIGN_PURE`` is set in the environment.
Both backends expose nw_fill / nw_score / cyclic_best_offset with identical
results (covered by tests/test_kernels.py).
"""

import os

from . import _pure

if os.environ.get("SHAPEALIGN_PURE"):
    backend = _pure
    BACKEND_NAME = "pure"
else:
    try:
        from . import _core as backend

        BACKEND_NAME = "compiled"
    except ImportError:
        backend = _pure
        BACKEND_NAME = "pure"

nw_fill = backend.nw_fill
nw_score = backend.nw_score
cyclic_best_offset = backend.cyclic_best_offset
