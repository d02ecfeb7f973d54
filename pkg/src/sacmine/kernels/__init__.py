"""Scan kernels: compiled extension when available, pure Python otherwise.

Set SACMINE_PURE_PYTHON=1 before import to force the fallback. Both
implementations share one contract and are parity-tested against each other;
benchmarks/kernel_bench.py compares their throughput.
"""

from __future__ import annotations

import os

from . import py_kernels

_impl = py_kernels
BACKEND = "python"
if not os.environ.get("SACMINE_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        pass

pair_scan = _impl.pair_scan
gap_clear_idx = _impl.gap_clear_idx
