"""Hot inner loops with a compiled core and a numpy fallback.

The compiled extension is preferred when importable; set
``SEMIDECAY_PURE_PYTHON=1`` to force the numpy backend (used by the
benchmark comparing both).  ``BACKEND`` records which one is active.
"""

import os

from . import _pykernels

if os.environ.get("SEMIDECAY_PURE_PYTHON") == "1":
    _impl = _pykernels
    BACKEND = "numpy"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels
        BACKEND = "numpy"

power_weight_sup = _impl.power_weight_sup
resolvent_weight_sup = _impl.resolvent_weight_sup
dot_powers = _impl.dot_powers
orbit_partial_sums = _impl.orbit_partial_sums

__all__ = [
    "BACKEND",
    "power_weight_sup",
    "resolvent_weight_sup",
    "dot_powers",
    "orbit_partial_sums",
]
