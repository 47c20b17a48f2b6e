"""Select the kernel core: compiled if importable, numpy otherwise.

Set ``HYPENT_PURE_PYTHON=1`` to force the numpy core.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _kernels_py

_compiled: ModuleType | None
try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None


def available() -> list[str]:
    names = ["python"]
    if _compiled is not None:
        names.insert(0, "cython")
    return names


def get_core(name: str | None = None) -> ModuleType:
    if name is None:
        name = "python" if os.environ.get("HYPENT_PURE_PYTHON", "") not in ("", "0") else "cython"
        if name == "cython" and _compiled is None:
            name = "python"
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("the compiled kernel core is not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


core = get_core()
BACKEND = core.NAME
