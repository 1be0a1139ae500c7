# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.  Same signatures as ``_kernels_py``.

Every kernel fills rows ``[row_start, row_stop)`` of a caller-owned output
array and releases the GIL, so disjoint row blocks can run on separate
threads without changing any result bit.
"""
import numpy as np

from libc.math cimport fabs, M_PI
from libc.stdlib cimport malloc, free


def direct_rows(const double complex[:, ::1] rho, const double complex[::1] twiddle,
                Py_ssize_t row_start, Py_ssize_t row_stop,
                double complex[:, ::1] out):
    """out[r, j] = (1/2pi) sum_i rho[i, r-i] exp(-i (2i-r) k_j)."""
    cdef Py_ssize_t size = rho.shape[0]
    cdef Py_ssize_t n_k = twiddle.shape[0]
    cdef Py_ssize_t r, j, i, lo, hi, f, t
    cdef double complex acc, term
    cdef double norm = 1.0 / (2.0 * M_PI)
    with nogil:
        for r in range(row_start, row_stop):
            lo = r - size + 1
            if lo < 0:
                lo = 0
            hi = r
            if hi > size - 1:
                hi = size - 1
            for j in range(n_k):
                acc = 0
                for i in range(lo, hi + 1):
                    f = 2 * i - r
                    t = (f * j) % n_k
                    if t < 0:
                        t = t + n_k
                    term = rho[i, r - i] * twiddle[t]
                    # exp(-i f k_j) = (-1)^f * twiddle[f j mod N]
                    if f & 1:
                        acc = acc - term
                    else:
                        acc = acc + term
                out[r, j] = acc * norm


cdef inline int _sign(double x, double eps) noexcept nogil:
    if x > eps:
        return 1
    if x < -eps:
        return -1
    return 0


def sign_filter_rows(const double[:, ::1] values, const double[::1] row_eps,
                     Py_ssize_t m_start, Py_ssize_t row_start, Py_ssize_t row_stop,
                     double[:, ::1] out):
    """Majority-vote sign correction of odd rows; even rows are copied."""
    cdef Py_ssize_t n_rows = values.shape[0]
    cdef Py_ssize_t n_k = values.shape[1]
    cdef Py_ssize_t r, j
    cdef int s_lo, s_mid, s_hi, vote
    cdef double w
    with nogil:
        for r in range(row_start, row_stop):
            if (m_start + r) % 2 == 0:
                for j in range(n_k):
                    out[r, j] = values[r, j]
                continue
            for j in range(n_k):
                w = values[r, j]
                s_lo = _sign(values[r - 1, j], row_eps[r - 1]) if r > 0 else 0
                s_hi = _sign(values[r + 1, j], row_eps[r + 1]) if r + 1 < n_rows else 0
                s_mid = _sign(w, row_eps[r])
                vote = 2 * s_lo + s_mid + 2 * s_hi
                if vote > 0:
                    out[r, j] = fabs(w)
                elif vote < 0:
                    out[r, j] = -fabs(w)
                else:
                    out[r, j] = w


def product_rows(const double[:, ::1] w1, const double[:, ::1] w2,
                 const double complex[::1] twiddle,
                 Py_ssize_t row_start, Py_ssize_t row_stop,
                 double complex[:, ::1] out):
    """Quadrature of the star-product integral for output rows in a block.

    out[r, j] = (1/2pi)(2pi/N)^2 sum_{j1,j2} X[j1,j2] Y[j2,j1] with
    X[j1,j2] = sum_{r1} w1[r1, j+j1-N/2] exp(-i (r1-r) k_{j2}),
    Y[j2,j1] = sum_{r2} w2[r2, j+j2-N/2] exp(+i (r2-r) k_{j1}).
    """
    cdef Py_ssize_t n_rows = w1.shape[0]
    cdef Py_ssize_t n_k = w1.shape[1]
    cdef Py_ssize_t half = n_k // 2
    cdef Py_ssize_t r, j, j1, j2, r1, r2, d, t, col
    cdef double complex acc, ph
    cdef double scale = (1.0 / (2.0 * M_PI)) * (2.0 * M_PI / n_k) * (2.0 * M_PI / n_k)
    cdef double complex *x = NULL
    cdef double complex *y = NULL
    with nogil:
        x = <double complex *> malloc(n_k * n_k * sizeof(double complex))
        y = <double complex *> malloc(n_k * n_k * sizeof(double complex))
        if x == NULL or y == NULL:
            free(x)
            free(y)
            with gil:
                raise MemoryError()
        for r in range(row_start, row_stop):
            for j in range(n_k):
                for j1 in range(n_k):
                    col = (j + j1 - half) % n_k
                    if col < 0:
                        col = col + n_k
                    for j2 in range(n_k):
                        x[j1 * n_k + j2] = 0
                        y[j1 * n_k + j2] = 0
                    for r1 in range(n_rows):
                        d = r1 - r
                        for j2 in range(n_k):
                            # exp(-i d k_{j2}) = (-1)^d * twiddle[d j2 mod N]
                            t = (d * j2) % n_k
                            if t < 0:
                                t = t + n_k
                            ph = twiddle[t]
                            if d & 1:
                                ph = -ph
                            x[j1 * n_k + j2] = x[j1 * n_k + j2] + w1[r1, col] * ph
                    for r2 in range(n_rows):
                        d = r2 - r
                        for j2 in range(n_k):
                            # here j1 plays the shift role for w2: Y[j1, j2] built transposed
                            t = (d * j2) % n_k
                            if t < 0:
                                t = t + n_k
                            ph = twiddle[t].conjugate()
                            if d & 1:
                                ph = -ph
                            y[j1 * n_k + j2] = y[j1 * n_k + j2] + w2[r2, col] * ph
                acc = 0
                for j1 in range(n_k):
                    for j2 in range(n_k):
                        # X[j1, j2] * Y[j2, j1]; y holds Y[shift=j1][phase=j2]
                        acc = acc + x[j1 * n_k + j2] * y[j2 * n_k + j1]
                out[r, j] = acc * scale
        free(x)
        free(y)
