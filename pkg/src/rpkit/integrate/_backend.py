"""Kernel selection: the compiled loop when importable, else pure Python.

Setting ``RPE_PURE_PYTHON=1`` forces the fallback.
"""

import os

from . import _kernel_py

_compiled = None
if os.environ.get("RPE_PURE_PYTHON") != "1":
    try:
        from . import _kernel as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def available() -> list:
    return ["cython", "python"] if _compiled is not None else ["python"]


def kernel(name: str | None = None):
    """The module providing ``rpe_solve`` for backend ``name`` (default: best)."""
    name = name or BACKEND
    if name == "python":
        return _kernel_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernel not built; reinstall with Cython available")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")
