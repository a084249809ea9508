# cython: language_level=3
"""Compiled inner loops for sparse multivariate series evaluation.

Both routines walk the terms in the order given (callers pass graded-lex
order) and build coordinate powers by repeated multiplication, so results
match ``holorep._kernels_py`` bit for bit on IEEE hardware.
"""
import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

cnp.import_array()

ctypedef double complex cplx


cdef inline void _fill_powers(const cplx[:, ::1] points, Py_ssize_t i,
                              Py_ssize_t n, Py_ssize_t width, cplx* pw) noexcept nogil:
    cdef Py_ssize_t j, e
    cdef cplx z
    for j in range(n):
        z = points[i, j]
        pw[j * width] = 1.0
        for e in range(1, width):
            pw[j * width + e] = pw[j * width + e - 1] * z


def eval_terms(const cplx[:, ::1] points, const long long[:, ::1] exps,
               const cplx[::1] coeffs):
    """Evaluate ``sum_t coeffs[t] * points**exps[t]`` at every point."""
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    cdef Py_ssize_t nterms = exps.shape[0]
    cdef Py_ssize_t width = 1
    cdef Py_ssize_t i, t, j
    cdef cplx acc, term
    cdef cplx* pw
    out = np.zeros(m, dtype=np.complex128)
    cdef cplx[::1] out_v = out
    if nterms == 0 or m == 0:
        return out
    if exps.shape[1] != n:
        raise ValueError("exponent width does not match point dimension")
    width = int(np.asarray(exps).max()) + 1
    pw = <cplx*> malloc(n * width * sizeof(cplx))
    if pw == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(m):
                _fill_powers(points, i, n, width, pw)
                acc = 0.0
                for t in range(nterms):
                    term = coeffs[t]
                    for j in range(n):
                        term = term * pw[j * width + exps[t, j]]
                    acc = acc + term
                out_v[i] = acc
    finally:
        free(pw)
    return out


def max_abs_terms(const cplx[:, ::1] points, const long long[:, ::1] exps,
                  const cplx[::1] coeffs):
    """Largest modulus of the series over the given points."""
    cdef Py_ssize_t m = points.shape[0]
    cdef Py_ssize_t n = points.shape[1]
    cdef Py_ssize_t nterms = exps.shape[0]
    cdef Py_ssize_t width, i, t, j
    cdef cplx acc, term
    cdef double best = 0.0, mod2
    cdef cplx* pw
    if nterms == 0 or m == 0:
        return 0.0
    if exps.shape[1] != n:
        raise ValueError("exponent width does not match point dimension")
    width = int(np.asarray(exps).max()) + 1
    pw = <cplx*> malloc(n * width * sizeof(cplx))
    if pw == NULL:
        raise MemoryError()
    try:
        with nogil:
            for i in range(m):
                _fill_powers(points, i, n, width, pw)
                acc = 0.0
                for t in range(nterms):
                    term = coeffs[t]
                    for j in range(n):
                        term = term * pw[j * width + exps[t, j]]
                    acc = acc + term
                mod2 = acc.real * acc.real + acc.imag * acc.imag
                if mod2 > best:
                    best = mod2
    finally:
        free(pw)
    return best ** 0.5
