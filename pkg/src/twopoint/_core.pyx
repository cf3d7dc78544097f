# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: Jacobi three-term recurrence and cyclic Jacobi rotations.

Both functions mirror :mod:`twopoint._pycore` exactly in semantics; the
backend selector in :mod:`twopoint._backend` picks one at import time.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


def jacobi_table(double alpha, double beta, Py_ssize_t kmax, t):
    """Rows 0..kmax of P_k^{alpha,beta} evaluated at every entry of ``t``."""
    cdef double[::1] x = np.ascontiguousarray(t, dtype=np.float64).ravel()
    cdef Py_ssize_t m = x.shape[0]
    out_arr = np.empty((kmax + 1, m), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, k
    cdef double ab = alpha + beta
    cdef double a1, a2, a3, a4, c2k, p0, p1
    for i in range(m):
        out[0, i] = 1.0
    if kmax == 0:
        return out_arr
    for i in range(m):
        out[1, i] = (alpha + 1.0) + (ab + 2.0) * (x[i] - 1.0) * 0.5
    for k in range(2, kmax + 1):
        c2k = 2.0 * k + ab
        a1 = 2.0 * k * (k + ab) * (c2k - 2.0)
        a2 = (c2k - 1.0) * c2k * (c2k - 2.0)
        a3 = (c2k - 1.0) * (alpha * alpha - beta * beta)
        a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c2k
        for i in range(m):
            p1 = out[k - 1, i]
            p0 = out[k - 2, i]
            out[k, i] = ((a2 * x[i] + a3) * p1 - a4 * p0) / a1
    return out_arr


cdef inline void _rotate(double[:, ::1] a, double[:, ::1] v, Py_ssize_t n,
                         Py_ssize_t p, Py_ssize_t q, bint vectors) noexcept nogil:
    cdef double apq = a[p, q]
    cdef double theta, t, c, s, tau, g, h
    cdef Py_ssize_t j
    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
    if fabs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / sqrt(t * t + 1.0)
    s = t * c
    tau = s / (1.0 + c)
    a[p, p] -= t * apq
    a[q, q] += t * apq
    a[p, q] = 0.0
    a[q, p] = 0.0
    for j in range(n):
        if j != p and j != q:
            g = a[j, p]
            h = a[j, q]
            a[j, p] = g - s * (h + g * tau)
            a[j, q] = h + s * (g - h * tau)
            a[p, j] = a[j, p]
            a[q, j] = a[j, q]
    if vectors:
        for j in range(n):
            g = v[j, p]
            h = v[j, q]
            v[j, p] = g - s * (h + g * tau)
            v[j, q] = h + s * (g - h * tau)


def jacobi_sweeps(double[:, ::1] a, double[:, ::1] v, double tol,
                  int max_sweeps, bint vectors):
    """Cyclic Jacobi rotations on ``a`` in place; returns sweeps used or -1.

    Stops once the off-diagonal Frobenius norm is at most ``tol`` times the
    Frobenius norm of the input.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q
    cdef int sweep, used = -1
    cdef double off, total = 0.0
    for p in range(n):
        for q in range(n):
            total += a[p, q] * a[p, q]
    total = sqrt(total)
    with nogil:
        for sweep in range(max_sweeps + 1):
            off = 0.0
            for p in range(n):
                for q in range(p + 1, n):
                    off += 2.0 * a[p, q] * a[p, q]
            if sqrt(off) <= tol * total:
                used = sweep
                break
            if sweep == max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    if a[p, q] != 0.0:
                        _rotate(a, v, n, p, q, vectors)
    return used
