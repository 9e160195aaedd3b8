"""Hot loops of the embedder and metrics.

Two interchangeable backends expose the same functions over flat ``uint8``
rasters and ``int64`` index arrays. numba is used when importable unless the
``RONIWM_NO_JIT`` environment variable is set to a truthy value; the flag is
read once, at import.
"""
import os

from . import _numpy as numpy_backend

_FALSY = {"", "0", "false", "no", "off"}

numba_backend = None
if os.environ.get("RONIWM_NO_JIT", "").strip().lower() in _FALSY:
    try:
        from . import _numba as numba_backend
    except ImportError:  # numba missing or broken on this platform
        numba_backend = None

active = numba_backend if numba_backend is not None else numpy_backend
BACKEND = active.NAME

roni_candidates = active.roni_candidates
label_slots = active.label_slots
write_bits = active.write_bits
read_bits = active.read_bits
clear_pixels = active.clear_pixels
sum_squared_diff = active.sum_squared_diff
histogram = active.histogram


def backends():
    """Every backend importable in this process, keyed by name."""
    out = {"numpy": numpy_backend}
    if numba_backend is not None:
        out["numba"] = numba_backend
    else:
        try:
            from . import _numba
        except ImportError:
            pass
        else:
            out["numba"] = _numba
    return out
