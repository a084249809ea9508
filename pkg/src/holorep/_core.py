"""Backend selection for the hot evaluation loops.

The compiled extension is used when it imports; set ``HOLOREP_PURE=1`` to
make the numpy fallback the default; both stay reachable through
the ``backend`` argument.
"""
import os

import numpy as np

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

HAVE_CYTHON = _compiled is not None
BACKEND = "cython" if HAVE_CYTHON and not os.environ.get("HOLOREP_PURE") else "python"
_impl = _compiled if BACKEND == "cython" else _kernels_py


def _prep(points, exps, coeffs):
    points = np.ascontiguousarray(np.atleast_2d(points), dtype=np.complex128)
    exps = np.ascontiguousarray(exps, dtype=np.int64).reshape(-1, points.shape[1])
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128).reshape(-1)
    return points, exps, coeffs


def eval_terms(points, exps, coeffs, backend=None):
    points, exps, coeffs = _prep(points, exps, coeffs)
    impl = _pick(backend)
    return np.asarray(impl.eval_terms(points, exps, coeffs))


def max_abs_terms(points, exps, coeffs, backend=None):
    points, exps, coeffs = _prep(points, exps, coeffs)
    impl = _pick(backend)
    return float(impl.max_abs_terms(points, exps, coeffs))


def _pick(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _kernels_py
    if backend == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return _compiled
    raise ValueError(f"unknown backend {backend!r}")
