"""Hot inner-loop kernels with numba and pure-numpy implementations.

The numba path is used when available; set STEREOFORGE_NO_NUMBA=1 to force
the numpy fallback. `benchmarks/bench_kernels.py` compares the two.
"""

import os

from . import _numpy as numpy_impl

try:
    from . import _numba as numba_impl
except ImportError:
    numba_impl = None

if numba_impl is not None and os.environ.get("STEREOFORGE_NO_NUMBA", "") in ("", "0"):
    _active = numba_impl
    IMPL = "numba"
else:
    _active = numpy_impl
    IMPL = "numpy"

frame_energies = _active.frame_energies
mask_to_runs = _active.mask_to_runs
refine_mask = _active.refine_mask

__all__ = ["frame_energies", "mask_to_runs", "refine_mask",
           "numpy_impl", "numba_impl", "IMPL"]
