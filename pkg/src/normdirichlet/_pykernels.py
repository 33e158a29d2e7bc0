"""Pure-Python/NumPy versions of the hot kernels (fallback for the Cython build)."""
import math

import numpy as np

_MAX_SWAPS = 100000


def lagrange_reduce(b11, b21, b12, b22):
    """Lagrange-Gauss reduction of the columns (b11, b21), (b12, b22).

    Returns (u1, u2, v1, v2, U00, U01, U10, U11): the reduced columns u, v with
    |u| <= |v| and u a Euclidean shortest vector, plus the integer matrix U such
    that [u v] = B @ U.
    """
    u1, u2, v1, v2 = float(b11), float(b21), float(b12), float(b22)
    a0, a1, c0, c1 = 1.0, 0.0, 0.0, 1.0  # coefficient columns of u and v
    nu = u1 * u1 + u2 * u2
    nv = v1 * v1 + v2 * v2
    if nu > nv:
        u1, u2, v1, v2 = v1, v2, u1, u2
        a0, a1, c0, c1 = c0, c1, a0, a1
        nu, nv = nv, nu
    for _ in range(_MAX_SWAPS):
        mu = math.floor((u1 * v1 + u2 * v2) / nu + 0.5)
        if mu != 0.0:
            v1 -= mu * u1
            v2 -= mu * u2
            c0 -= mu * a0
            c1 -= mu * a1
            nv = v1 * v1 + v2 * v2
        if nv >= nu:
            return u1, u2, v1, v2, a0, c0, a1, c1
        u1, u2, v1, v2 = v1, v2, u1, u2
        a0, a1, c0, c1 = c0, c1, a0, a1
        nu, nv = nv, nu
    raise RuntimeError("Lagrange reduction did not terminate")


def envelope_min_sq(eps, q, s):
    """min_k (e^s eps_k)^2 + (e^-s q_k)^2 for every s, with the minimizing k.

    eps must be non-increasing in absolute value and q non-decreasing.
    """
    eps = np.asarray(eps, dtype=float)
    q = np.asarray(q, dtype=float)
    s = np.atleast_1d(np.asarray(s, dtype=float))
    out = np.empty(s.shape[0])
    idx = np.empty(s.shape[0], dtype=np.int64)
    chunk = max(1, 2 ** 20 // max(1, eps.shape[0]))
    with np.errstate(over="ignore", invalid="ignore"):
        for lo in range(0, s.shape[0], chunk):
            ss = s[lo:lo + chunk, None]
            vals = (np.exp(ss) * eps) ** 2 + (np.exp(-ss) * q) ** 2
            k = np.argmin(vals, axis=1)
            idx[lo:lo + chunk] = k
            out[lo:lo + chunk] = vals[np.arange(k.shape[0]), k]
    return out, idx
