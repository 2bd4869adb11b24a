"""Kernel dispatch: compiled Cython core when built, numpy fallback otherwise.

Set ``LORE_PURE_PYTHON=1`` to force the fallback (used by the benchmark and
the cross-backend parity tests). Both backends produce bit-identical output.
"""

import os

from . import pykernels

if os.environ.get("LORE_PURE_PYTHON", "") == "1":
    _impl = pykernels
    BACKEND = "python"
else:
    try:
        from . import ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = pykernels
        BACKEND = "python"

accumulate = _impl.accumulate
greedy_decode = _impl.greedy_decode
repair = _impl.repair
