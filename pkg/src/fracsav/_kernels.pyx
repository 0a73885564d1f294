# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the fractional history term.

Mirrors ``fracsav._pykernels`` one function at a time; the two are checked
against each other in the test suite.
"""

from libc.math cimport pow, log1p, expm1
from scipy.linalg.cython_blas cimport dgemv


def kernel_row(const double[::1] nodes, const double[::1] steps, Py_ssize_t n,
               double p, bint half, double[::1] out):
    cdef Py_ssize_t k
    cdef double lead = 0.5 * steps[n] if half else steps[n]
    cdef double far
    with nogil:
        for k in range(n):
            far = lead + (nodes[n] - nodes[k + 1])
            out[k] = pow(far, p) * expm1(p * log1p(steps[k] / far))
        out[n] = pow(lead, p)


def history_sum(const double[::1] coeffs, const double[:, ::1] incr,
                Py_ssize_t n, double[::1] out):
    # out = incr[:n].T @ coeffs[:n]; the row-major (n, npts) block is a
    # column-major (npts, n) matrix for BLAS
    cdef int m = <int>incr.shape[1]
    cdef int cols = <int>n
    cdef int one = 1
    cdef double alpha = 1.0, beta = 0.0
    cdef char trans = b'N'
    cdef Py_ssize_t i
    if n == 0:
        for i in range(m):
            out[i] = 0.0
        return
    with nogil:
        dgemv(&trans, &m, &cols, &alpha, <double*>&incr[0, 0], &m,
              <double*>&coeffs[0], &one, &beta, &out[0], &one)
