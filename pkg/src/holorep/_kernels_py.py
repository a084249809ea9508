"""Pure numpy versions of the routines in ``_kernels.pyx``.

Vectorized over points, sequential over terms; powers are built by
repeated multiplication exactly as in the compiled loop.
"""
import numpy as np

_CHUNK = 1 << 14


def _powers(points, width):
    m, n = points.shape
    pw = np.empty((n, width, m), dtype=np.complex128)
    pw[:, 0, :] = 1.0
    zt = points.T
    for e in range(1, width):
        pw[:, e, :] = pw[:, e - 1, :] * zt
    return pw


def _eval_chunk(points, exps, coeffs, width):
    pw = _powers(points, width)
    n = points.shape[1]
    acc = np.zeros(points.shape[0], dtype=np.complex128)
    for t in range(exps.shape[0]):
        term = np.full(points.shape[0], coeffs[t], dtype=np.complex128)
        for j in range(n):
            term = term * pw[j, exps[t, j]]
        acc = acc + term
    return acc


def eval_terms(points, exps, coeffs):
    """Evaluate ``sum_t coeffs[t] * points**exps[t]`` at every point."""
    points = np.ascontiguousarray(points, dtype=np.complex128)
    exps = np.ascontiguousarray(exps, dtype=np.int64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    out = np.zeros(points.shape[0], dtype=np.complex128)
    if exps.shape[0] == 0 or points.shape[0] == 0:
        return out
    if exps.shape[1] != points.shape[1]:
        raise ValueError("exponent width does not match point dimension")
    width = int(exps.max()) + 1
    for lo in range(0, points.shape[0], _CHUNK):
        out[lo:lo + _CHUNK] = _eval_chunk(points[lo:lo + _CHUNK], exps, coeffs, width)
    return out


def max_abs_terms(points, exps, coeffs):
    """Largest modulus of the series over the given points."""
    vals = eval_terms(points, exps, coeffs)
    if vals.size == 0:
        return 0.0
    return float(np.sqrt(np.max(vals.real * vals.real + vals.imag * vals.imag)))
