"""Pick the kernel implementation at import time.

The compiled extension is used when it has been built; otherwise, or when
``POSMAP_PURE_PYTHON`` is set to a non-empty value other than ``0``, the
numpy fallback is used.  ``BACKEND`` names the active choice.
"""
import os

from . import _pykernels

_force_pure = os.environ.get("POSMAP_PURE_PYTHON", "") not in ("", "0")

try:
    if _force_pure:
        raise ImportError("pure-python backend forced")
    from . import _ckernels as kernels
    BACKEND = "cython"
except ImportError:
    kernels = _pykernels
    BACKEND = "python"

fallback = _pykernels


def compiled_kernels():
    """Return the compiled module, or ``None`` if it is not importable."""
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels
