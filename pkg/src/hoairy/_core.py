"""Select the compiled contour kernel when it is built, else the numpy one."""

from . import _contour_py

try:
    from . import _contour as _compiled
except ImportError:  # pragma: no cover - exercised only without a compiler
    _compiled = None

BACKENDS = {"numpy": _contour_py}
if _compiled is not None:
    BACKENDS["cython"] = _compiled

BACKEND = "cython" if _compiled is not None else "numpy"

__all__ = ["BACKEND", "BACKENDS"]
