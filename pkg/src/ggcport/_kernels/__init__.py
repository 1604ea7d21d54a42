"""Hot kernels, compiled when available.

The Cython build (``_ckernels``) is preferred; set ``GGCPORT_PURE_PYTHON=1``
to force the numpy fallback. ``BACKEND`` names what was selected.
"""

import os

from . import _pykernels as python

compiled = None
if os.environ.get("GGCPORT_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else python
BACKEND = "cython" if compiled is not None else "python"

counter_uniform = _impl.counter_uniform
moschopoulos_coefficients = _impl.moschopoulos_coefficients
moschopoulos_pdf = _impl.moschopoulos_pdf
moschopoulos_cdf = _impl.moschopoulos_cdf
gig_log_rejection = _impl.gig_log_rejection

__all__ = [
    "BACKEND",
    "compiled",
    "python",
    "counter_uniform",
    "moschopoulos_coefficients",
    "moschopoulos_pdf",
    "moschopoulos_cdf",
    "gig_log_rejection",
]
