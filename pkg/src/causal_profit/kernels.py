"""Backend selection for the prefix-curve kernels.

The compiled extension is used when it was built; otherwise, or when
``CAUSAL_PROFIT_PURE_PYTHON=1`` is set, the numpy implementation is used.

Both kernels walk a score-sorted table once. For each prefix length k they
keep, per treatment arm, the number of rows and the sum of a per-row reward,
and emit ``(mean_0(k) - mean_1(k)) * k``. An arm with no rows in the prefix
falls back to the prefix mean of a per-row ``base`` value (zero by default).
"""

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("CAUSAL_PROFIT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

prefix_curve = _impl.prefix_curve
prefix_area = _impl.prefix_area
