"""Selects compiled pairwise kernels when available, numpy fallback otherwise.

The compiled extension is optional (it only accelerates the two analytic
kernel families); table kernels and any environment without a compiler go
through the numpy implementation.  Set BLAYER_FORCE_PY=1 to force the
fallback, e.g. for benchmarking.
"""

import os

import numpy as np

from . import _kernels_py

if os.environ.get("BLAYER_FORCE_PY"):
    _ext = None
else:
    try:
        from . import _kernels as _ext
    except ImportError:
        _ext = None

COMPILED = _ext is not None


def _compiled_args(V):
    """(kid, p0, p1) for kernels the extension implements, else None."""
    if _ext is None:
        return None
    if V.kernel_id == "wall":
        from .potentials import WALL_NORM

        return 0, WALL_NORM, 0.0
    if V.kernel_id == "power":
        a, c = V.params
        return 1, a, c
    return None


def pair_energy(x, gamma, V):
    x = np.ascontiguousarray(x, dtype=float)
    args = _compiled_args(V)
    if args is not None:
        return _ext.pair_energy(x, gamma, *args)
    return _kernels_py.pair_energy(x, gamma, V)


def pair_gradient(x, gamma, V):
    x = np.ascontiguousarray(x, dtype=float)
    args = _compiled_args(V)
    if args is not None:
        return _ext.pair_gradient(x, gamma, *args)
    return _kernels_py.pair_gradient(x, gamma, V)


def pair_hessian(x, gamma, V):
    x = np.ascontiguousarray(x, dtype=float)
    args = _compiled_args(V)
    if args is not None:
        return _ext.pair_hessian(x, gamma, *args)
    return _kernels_py.pair_hessian(x, gamma, V)
