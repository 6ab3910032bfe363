"""Hot inner loops, numba-compiled when available.

Set ``PRIVML_DISABLE_NUMBA=1`` to force the pure-numpy path (useful for
debugging and for environments without numba).
"""

import os

from . import _numpy

BACKEND = "numpy"

if os.environ.get("PRIVML_DISABLE_NUMBA", "").strip().lower() not in ("1", "true", "yes"):
    try:
        from . import _numba as _impl
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is optional
        _impl = _numpy
else:
    _impl = _numpy

label_feature_counts = _impl.label_feature_counts
row_weight_sums = _impl.row_weight_sums
pav = _impl.pav
smooth_sensitivity_median = _impl.smooth_sensitivity_median
nearest_center = _impl.nearest_center

__all__ = [
    "BACKEND",
    "label_feature_counts",
    "row_weight_sums",
    "pav",
    "smooth_sensitivity_median",
    "nearest_center",
]
