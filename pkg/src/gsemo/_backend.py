"""Pick the compiled kernels when they import, else the pure-Python engine.

Set ``GSEMO_PURE_PYTHON=1`` to force the fallback.
"""
import os

_kernels = None
if not os.environ.get("GSEMO_PURE_PYTHON"):
    try:
        from . import _kernels  # noqa: F811
    except ImportError:  # extension not built
        _kernels = None

COMPILED = _kernels is not None
DEFAULT = "compiled" if COMPILED else "python"


def resolve(backend=None) -> str:
    if backend is None:
        return DEFAULT
    if backend not in ("compiled", "python"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "compiled" and not COMPILED:
        raise RuntimeError("compiled kernels are not available; build the extension")
    return backend


def kernels():
    if _kernels is None:
        raise RuntimeError("compiled kernels are not available")
    return _kernels
