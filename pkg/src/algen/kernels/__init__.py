"""Hot inner loops, compiled when possible.

The Cython extension ``_ext`` is used if it was built; otherwise the
pure-Python module ``_pure`` is used. Setting ``ALGEN_PURE_PYTHON=1`` forces
the fallback. Both expose ``mul_packed`` and ``echelon`` with identical
semantics.
"""

import os

from . import _pure

if os.environ.get("ALGEN_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pure
else:
    try:
        from . import _ext as _impl
    except ImportError:
        _impl = _pure

BACKEND = "cython" if _impl is not _pure else "python"

mul_packed = _impl.mul_packed
echelon = _impl.echelon


def backends():
    """Available kernel modules keyed by name (for tests and benchmarks)."""
    out = {"python": _pure}
    try:
        from . import _ext
    except ImportError:
        pass
    else:
        out["cython"] = _ext
    return out
