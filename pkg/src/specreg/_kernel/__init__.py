"""Filter/smoother kernels with a compiled fast path.

The Cython extension is preferred when it built; setting the environment
variable SPECREG_PURE_PYTHON to a non-empty value other than "0" forces the
numpy fallback. Both backends implement identical contracts.
"""

import os

from . import pyloop

_impl = pyloop
if os.environ.get("SPECREG_PURE_PYTHON", "").strip() in ("", "0"):
    try:
        from . import _fast as _impl
    except ImportError:
        _impl = pyloop

BACKEND = "compiled" if _impl is not pyloop else "python"

filter_pass = _impl.filter_pass
filter_loglik = _impl.filter_loglik
smoother_pass = _impl.smoother_pass
