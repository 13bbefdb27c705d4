# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled displacement-matrix kernels.

Matrix elements of the untruncated displacement operator, for m = n + d >= n:

    <n+d|D(lam)|n> = lam^d / sqrt(d!) * e^{-|lam|^2/2} * q_n * L_n^(d)(|lam|^2),
    q_n = sqrt(n! d! / (n+d)!)

L_n^(d) is advanced by the three-term Laguerre recurrence along each
diagonal (stable in double precision, unlike the column recurrence from
D a^dag = (a^dag - lam*) D). The upper triangle follows from
<n|D|n+d> = (-1)^d conj(<n+d|D|n>). Underflows for |lam| above ~37.

Summation order is fixed, so results are reproducible run to run.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, exp

cnp.import_array()


cdef void _fill(double complex lam, double complex[:, ::1] out,
                Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t d, k
    cdef double x = lam.real * lam.real + lam.imag * lam.imag
    cdef double complex base = exp(-0.5 * x)
    cdef double complex v
    cdef double lag, lag_prev, lag_next, q, sign
    for d in range(n):
        if d > 0:
            base = base * lam / sqrt(<double>d)
        sign = -1.0 if d % 2 else 1.0
        lag_prev = 0.0
        lag = 1.0
        q = 1.0
        for k in range(n - d):
            v = base * (q * lag)
            out[k + d, k] = v
            if d > 0:
                out[k, k + d] = sign * (v.real - 1j * v.imag)
            lag_next = ((2 * k + 1 + d - x) * lag - (k + d) * lag_prev) / (k + 1)
            lag_prev = lag
            lag = lag_next
            q = q * sqrt((k + 1.0) / (k + 1.0 + d))


def displacement_matrix(double complex lam, Py_ssize_t n):
    """Exact ``<m|D(lam)|k>`` for ``m, k < n``."""
    cdef cnp.ndarray[double complex, ndim=2] out = np.empty((n, n), dtype=np.complex128)
    _fill(lam, out, n)
    return out


def displacement_sum(lams, coeffs, Py_ssize_t n):
    """``sum_p coeffs[p] * D(lams[p])`` cropped to ``n`` levels."""
    cdef double complex[::1] lv = np.ascontiguousarray(lams, dtype=np.complex128)
    cdef double complex[::1] cv = np.ascontiguousarray(coeffs, dtype=np.complex128)
    if lv.shape[0] != cv.shape[0]:
        raise ValueError("lams and coeffs must have the same length")
    cdef cnp.ndarray[double complex, ndim=2] acc_arr = np.zeros((n, n), dtype=np.complex128)
    cdef double complex[:, ::1] acc = acc_arr
    cdef double complex[:, ::1] d = np.empty((n, n), dtype=np.complex128)
    cdef Py_ssize_t p, i, j, npts = lv.shape[0]
    cdef double complex c
    with nogil:
        for p in range(npts):
            c = cv[p]
            if c.real == 0.0 and c.imag == 0.0:
                continue
            _fill(lv[p], d, n)
            for i in range(n):
                for j in range(n):
                    acc[i, j] = acc[i, j] + c * d[i, j]
    return acc_arr
