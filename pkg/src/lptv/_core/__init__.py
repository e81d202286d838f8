"""Hot elementwise kernels with backend selection at import time.

The Cython extension is used when it built; otherwise the numpy fallback.
Set LPTV_PURE_PYTHON=1 to force the fallback (useful for benchmarking and
for debugging numerical questions without the extension in the loop).
Both backends compute identical values to the last ulp wherever the same
floating-point operations are expressible, and agree within 1e-12 elsewhere.
"""

import os

if os.environ.get("LPTV_PURE_PYTHON"):
    from . import _numpy as _backend
    BACKEND = "numpy"
else:
    try:
        from . import _speedups as _backend
        BACKEND = "cython"
    except ImportError:
        from . import _numpy as _backend
        BACKEND = "numpy"

shrink_weighted = _backend.shrink_weighted
lp_power_sum = _backend.lp_power_sum
