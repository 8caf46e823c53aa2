"""Kernel backend selection.

The compiled extension is preferred. Set ``MABPRUNE_BACKEND=python`` to force
the NumPy fallback (useful for parity checks and benchmarking).
"""

import importlib
import os

AVAILABLE = ("cython", "python")


def load(name=None):
    """Return the kernel module for ``name`` ("cython", "python" or None for auto)."""
    if name is None:
        name = os.environ.get("MABPRUNE_BACKEND", "auto").lower()
    if name == "python":
        return importlib.import_module("mabprune._pykernels")
    if name == "cython":
        return importlib.import_module("mabprune._kernels")
    if name != "auto":
        raise ValueError(f"unknown backend {name!r}; expected one of {AVAILABLE}")
    try:
        return importlib.import_module("mabprune._kernels")
    except ImportError:
        return importlib.import_module("mabprune._pykernels")


kernels = load()
BACKEND = kernels.NAME
