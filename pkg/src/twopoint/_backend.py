"""Import-time selection between the compiled core and the NumPy fallback.

Set ``TWOPOINT_PURE_PYTHON=1`` to force the fallback even when the
extension is built.
"""
import os

from . import _pycore

BACKENDS = {"python": _pycore}

try:
    from . import _core
except ImportError:  # extension not built
    _core = None
else:
    BACKENDS["cython"] = _core

if _core is not None and os.environ.get("TWOPOINT_PURE_PYTHON", "") in ("", "0"):
    NAME = "cython"
else:
    NAME = "python"

kernels = BACKENDS[NAME]


def get(name=None):
    """Return the kernel module called ``name`` (default: the active one)."""
    if name is None:
        return kernels
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(BACKENDS)}") from None
