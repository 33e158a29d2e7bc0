# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; same API as _pykernels."""
from libc.math cimport floor, exp
import numpy as np

DEF MAX_SWAPS = 100000


def lagrange_reduce(double b11, double b21, double b12, double b22):
    """Lagrange-Gauss reduction; see _pykernels.lagrange_reduce."""
    cdef double u1 = b11, u2 = b21, v1 = b12, v2 = b22
    cdef double a0 = 1.0, a1 = 0.0, c0 = 0.0, c1 = 1.0
    cdef double nu = u1 * u1 + u2 * u2
    cdef double nv = v1 * v1 + v2 * v2
    cdef double mu, t
    cdef int it
    if nu > nv:
        t = u1; u1 = v1; v1 = t
        t = u2; u2 = v2; v2 = t
        t = a0; a0 = c0; c0 = t
        t = a1; a1 = c1; c1 = t
        t = nu; nu = nv; nv = t
    for it in range(MAX_SWAPS):
        mu = floor((u1 * v1 + u2 * v2) / nu + 0.5)
        if mu != 0.0:
            v1 -= mu * u1
            v2 -= mu * u2
            c0 -= mu * a0
            c1 -= mu * a1
            nv = v1 * v1 + v2 * v2
        if nv >= nu:
            return u1, u2, v1, v2, a0, c0, a1, c1
        t = u1; u1 = v1; v1 = t
        t = u2; u2 = v2; v2 = t
        t = a0; a0 = c0; c0 = t
        t = a1; a1 = c1; c1 = t
        t = nu; nu = nv; nv = t
    raise RuntimeError("Lagrange reduction did not terminate")


def envelope_min_sq(eps, q, s):
    """Lower envelope of (e^s eps_k)^2 + (e^-s q_k)^2; see _pykernels.envelope_min_sq.

    A moving pointer plus monotonicity of |eps_k| and q_k prunes the scan.
    """
    cdef double[::1] e = np.ascontiguousarray(eps, dtype=np.float64)
    cdef double[::1] qq = np.ascontiguousarray(q, dtype=np.float64)
    cdef double[::1] ss = np.ascontiguousarray(np.atleast_1d(s), dtype=np.float64)
    cdef Py_ssize_t n = ss.shape[0], K = e.shape[0]
    out_arr = np.empty(n)
    idx_arr = np.empty(n, dtype=np.int64)
    cdef double[::1] out = out_arr
    cdef long long[::1] idx = idx_arr
    cdef Py_ssize_t i, j, ptr = 0, best
    cdef double es, ems, a, b, f, m
    if K == 0:
        raise ValueError("empty convergent list")
    for i in range(n):
        es = exp(ss[i])
        ems = exp(-ss[i])
        a = es * e[ptr]
        b = ems * qq[ptr]
        m = a * a + b * b
        best = ptr
        j = ptr - 1
        while j >= 0:
            a = es * e[j]
            a = a * a
            if a > m:
                break
            b = ems * qq[j]
            f = a + b * b
            if f < m:
                m = f
                best = j
            j -= 1
        j = ptr + 1
        while j < K:
            b = ems * qq[j]
            b = b * b
            if b > m:
                break
            a = es * e[j]
            f = a * a + b
            if f < m:
                m = f
                best = j
            j += 1
        out[i] = m
        idx[i] = best
        ptr = best
    return out_arr, idx_arr
