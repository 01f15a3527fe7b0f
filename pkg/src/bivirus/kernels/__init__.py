"""Kernel backend selection.

The compiled Cython kernels are preferred; the NumPy implementation in
:mod:`bivirus.kernels.pure` is the fallback. Set the environment variable
``BIVIRUS_FORCE_PURE=1`` to force the fallback (used by the benchmark and
for debugging).
"""

import os

if os.environ.get("BIVIRUS_FORCE_PURE"):
    from . import pure as _impl
else:
    try:
        from . import _native as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import pure as _impl

BACKEND = _impl.BACKEND
field = _impl.field
jacobian = _impl.jacobian
integrate = _impl.integrate

STATUS_CONVERGED = _impl.STATUS_CONVERGED
STATUS_MAX_TIME = _impl.STATUS_MAX_TIME
STATUS_REGION_VIOLATION = _impl.STATUS_REGION_VIOLATION
STATUS_STEP_UNDERFLOW = _impl.STATUS_STEP_UNDERFLOW
STATUS_STEP_BUDGET = _impl.STATUS_STEP_BUDGET
