"""Kernel backend selection.

The compiled extension is preferred; set ``SYMGAUSS_BACKEND=python`` to
force the numpy fallback (useful for benchmarking and debugging).
"""
import os

from . import _pykernels

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

_requested = os.environ.get("SYMGAUSS_BACKEND", "").strip().lower()

if _compiled is not None and _requested != "python":
    kernels = _compiled
    BACKEND = "compiled"
else:
    kernels = _pykernels
    BACKEND = "python"


def available_backends():
    """Names of the backends importable in this environment."""
    return ["compiled", "python"] if _compiled is not None else ["python"]


def get_kernels(name=None):
    """Return the kernel module for ``name`` (``None`` gives the active one)."""
    if name is None:
        return kernels
    if name == "python":
        return _pykernels
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernels are not built; run `pip install -e .`")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
