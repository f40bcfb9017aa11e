"""Kernel backend selection.

The compiled extension is preferred when built; otherwise the pure-Python
fallback is used. Both implement identical arithmetic (see _pyfallback).
Set CALIBREC_KERNELS=python to force the fallback, =cython to require the
compiled core (import error if missing).
"""

import os

_requested = os.environ.get("CALIBREC_KERNELS", "auto").strip().lower()

if _requested in ("auto", "", "cython", "c"):
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:
        if _requested in ("cython", "c"):
            raise
        from . import _pyfallback as _impl
        BACKEND = "python"
elif _requested in ("python", "py"):
    from . import _pyfallback as _impl
    BACKEND = "python"
else:
    raise RuntimeError(
        f"unrecognized CALIBREC_KERNELS value {_requested!r}; "
        "use 'auto', 'cython' or 'python'"
    )

sgd_epoch = _impl.sgd_epoch
greedy_rerank = _impl.greedy_rerank

__all__ = ["BACKEND", "sgd_epoch", "greedy_rerank"]
