"""Hot tangency kernels: compiled extension when available, numpy fallback
otherwise.  Set CONELAB_PURE_PYTHON=1 to force the fallback (used by the
benchmark and by tests that compare the two backends).
"""

import os

from . import _tangency_py

_force_pure = os.environ.get("CONELAB_PURE_PYTHON", "") == "1"
_impl = None
if not _force_pure:
    try:
        from . import _tangency as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = None
if _impl is None:
    _impl = _tangency_py

BACKEND = _impl.BACKEND_NAME
pnorm_tangent_angles = _impl.pnorm_tangent_angles
pnorm_gauge = _impl.pnorm_gauge
radial_tangent_angles = _impl.radial_tangent_angles
radial_radius = _impl.radial_radius


def compiled_available() -> bool:
    if _force_pure:
        try:
            from . import _tangency  # noqa: F401

            return True
        except ImportError:
            return False
    return BACKEND == "compiled"
