"""Kernel dispatch.

Each kernel comes from the compiled ``_kernels`` extension when it is
importable, except the dense dot-product kernels, where NumPy's BLAS path is
faster than the portable compiled loops (see ``benchmarks/bench_kernels.py``).
Set ``HOMOMETRY_PURE=1`` to force the NumPy fallback for every kernel.
"""
import os

from . import _fallback

# kernels that stay on NumPy even when the extension is present
_NUMPY_FASTER = {"autocorr_1d", "block_power", "block_power_2d", "pointset_amplitude", "mask_overlaps"}

_NAMES = (
    "autocorr_1d",
    "autocorr_2d",
    "block_power",
    "block_power_2d",
    "pointset_amplitude",
    "mask_overlaps",
    "sliding_codes",
    "patch_codes",
    "visible_mask",
)

BACKEND = "python"
_compiled = None
if not os.environ.get("HOMOMETRY_PURE"):
    try:
        from . import _kernels as _compiled

        BACKEND = "cython"
    except ImportError:
        _compiled = None


def _pick(name):
    if _compiled is None or name in _NUMPY_FASTER:
        return getattr(_fallback, name), "python"
    return getattr(_compiled, name), "cython"


SOURCES = {}
for _name in _NAMES:
    globals()[_name], SOURCES[_name] = _pick(_name)

__all__ = ["BACKEND", "SOURCES", *_NAMES]
