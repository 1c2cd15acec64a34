"""Backend selection for the hot kernels.

The compiled extension ``smbp._kernels`` is used when it is importable; the
pure-Python module is the fallback.  Set ``SMBP_PURE_PYTHON=1`` to force the
fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("SMBP_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

RULE_RATIO = 0
RULE_MIN_INCREMENT = 1
FEAS_TOL = _kernels_py.FEAS_TOL

greedy_fill = _impl.greedy_fill
fixing_greedy = _impl.fixing_greedy
knapsack_enum = _impl.knapsack_enum
subset_feasible = _impl.subset_feasible
min_bins_dp = _impl.min_bins_dp
greedy_min_util = _impl.greedy_min_util


def backends():
    """All importable kernel modules keyed by name (for tests and benchmarks)."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels as compiled
    except ImportError:
        pass
    else:
        out["cython"] = compiled
    return out
