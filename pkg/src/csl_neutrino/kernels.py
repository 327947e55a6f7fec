"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise, or when the
environment variable ``CSL_NEUTRINO_PURE_PYTHON`` is set to a non-empty
value, the numpy fallback is used. Both consume random numbers in the same
order, so a given seed produces the same Wiener paths on either backend.
"""
import os

from . import _fallback

_BACKENDS = {"python": _fallback}

try:
    from . import _accel
except ImportError:  # extension not built
    _accel = None
else:
    _BACKENDS["cython"] = _accel

if _accel is not None and not os.environ.get("CSL_NEUTRINO_PURE_PYTHON"):
    _active = _accel
else:
    _active = _fallback

BACKEND = _active.BACKEND
accumulate_phase_paths = _active.accumulate_phase_paths


def available_backends():
    return sorted(_BACKENDS)


def get_backend(name=None):
    """Kernel module for ``name`` ("cython" or "python"); default is the active one."""
    if name is None:
        return _active
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}") from None
