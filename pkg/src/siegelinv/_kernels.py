"""Kernel backend selection.

Prefers the compiled extension; falls back to the pure-Python kernels when
it is missing or when SIEGELINV_PURE=1 is set in the environment.  Both
backends are rounding-for-rounding identical.
"""

import os

from . import _qkernel_py

if os.environ.get("SIEGELINV_PURE") == "1":
    _impl = _qkernel_py
else:
    try:
        from . import _qkernel as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _qkernel_py

BACKEND = _impl.backend_name()
qprod = _impl.qprod
one_minus_qn_prod = _impl.one_minus_qn_prod
