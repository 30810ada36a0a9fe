"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python twin.
Callers go through ``kernels.active`` so a backend switch takes effect immediately.
"""
import logging

from . import _pykernels

log = logging.getLogger(__name__)

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None
    log.debug("compiled kernels unavailable, using pure-Python fallback")

BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["compiled"] = _ckernels

active = _ckernels if _ckernels is not None else _pykernels


def backend_name():
    return "compiled" if active is _ckernels and _ckernels is not None else "python"


def use_backend(name):
    """Switch the process-wide kernel backend; returns the previous backend name."""
    global active
    if name not in BACKENDS:
        raise ValueError(f"unknown or unavailable backend {name!r}; have {sorted(BACKENDS)}")
    prev = backend_name()
    active = BACKENDS[name]
    return prev
