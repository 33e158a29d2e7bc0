"""Diagonal-flow trajectories a_s u_alpha Z^2, Dirichlet hit detection, and the direct check.

Along the trajectory of alpha the lattice a_s u_alpha Z^2 becomes extremely
skewed, so a floating-point basis [[e^s, e^s alpha], [0, e^-s]] loses all
precision once e^(2s) exceeds 2^53.  Instead alpha is held as an exact
rational and its continued-fraction convergents p_k/q_k supply lattice vectors
(e^s (q_k alpha - p_k), e^-s q_k).  Consecutive convergents form a basis, and
the pair near the balance point of a_s is well conditioned at every s.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from numbers import Rational

import mpmath
import numpy as np

from . import dani, norms
from ._kernels import envelope_min_sq
from .lattice import Lattice, delta as lattice_delta

_MARGIN = 6.0   # convergents are kept until q_k > e^(s_max + margin)


def to_fraction(alpha) -> Fraction:
    """Exact rational value of alpha (int, float, Fraction, Decimal, str, or mpmath.mpf)."""
    if isinstance(alpha, Fraction):
        return alpha
    if isinstance(alpha, (int, Rational)):
        return Fraction(alpha)
    if isinstance(alpha, float):
        if not math.isfinite(alpha):
            raise ValueError("alpha must be finite")
        return Fraction(alpha)
    if isinstance(alpha, Decimal):
        return Fraction(alpha)
    if isinstance(alpha, mpmath.mpf):
        if not mpmath.isfinite(alpha):
            raise ValueError("alpha must be finite")
        man, exp = alpha.man_exp
        return Fraction(int(man)) * (Fraction(2) ** int(exp))
    if isinstance(alpha, str):
        try:
            return Fraction(alpha.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot read alpha from {alpha!r}") from exc
    if isinstance(alpha, np.floating):
        return Fraction(float(alpha))
    raise TypeError(f"unsupported alpha type {type(alpha).__name__}")


class ConvergentFrame:
    """Continued-fraction convergents of a rational alpha up to denominators ~ e^(s_max)."""

    def __init__(self, alpha, s_max: float):
        a = to_fraction(alpha)
        self.alpha = a
        self.s_max = float(s_max)
        limit = math.exp(min(self.s_max, 700.0) + _MARGIN)
        num, den = a.numerator, a.denominator
        ps, qs = [1], [0]           # the vector (-1, 0) comes first
        p2, q2, p1, q1 = 0, 1, 1, 0
        x_num, x_den = num, den
        while True:
            ak = x_num // x_den
            p, q = ak * p1 + p2, ak * q1 + q2
            ps.append(p)
            qs.append(q)
            p2, q2, p1, q1 = p1, q1, p, q
            x_num, x_den = x_den, x_num - ak * x_den
            if x_den == 0 or q > limit:
                break
        self.p = ps
        self.q = qs
        self.eps = np.array([float(Fraction(q * num - p * den, den)) for p, q in zip(ps, qs)])
        self.qf = np.array([float(q) for q in qs])
        self.exact = x_den == 0   # the expansion terminated: alpha == p[-1]/q[-1]

    def __len__(self):
        return len(self.p)

    def _check(self, s):
        if np.max(s) > self.s_max + 1e-9 and not self.exact:
            raise ValueError(f"s = {np.max(s)} beyond the frame horizon {self.s_max}")

    def euclidean_min_sq(self, s):
        """Squared Euclidean length of the shortest vector of a_s u_alpha Z^2, and the convergent index."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        self._check(s)
        return envelope_min_sq(self.eps, self.qf, s)

    def basis(self, s: float, k: int | None = None) -> np.ndarray:
        """A well-conditioned basis of a_s u_alpha Z^2 built from consecutive convergents."""
        if k is None:
            k = int(self.euclidean_min_sq(s)[1][0])
        k = min(k, len(self) - 2) if len(self) >= 2 else 0
        es, ems = math.exp(s), math.exp(-s)
        return np.array([[es * self.eps[k], es * self.eps[k + 1]],
                         [ems * self.qf[k], ems * self.qf[k + 1]]])


def _monotone(norm: norms.NormDescriptor) -> bool:
    """Norms that are non-decreasing in |x| and |y| separately (sup, lp)."""
    return norm.dimension == 2 and (norm.kind in (norms.SUP, norms.EUCLIDEAN, norms.LP))


def delta_along(frame: ConvergentFrame, norm: norms.NormDescriptor, critical_value: float, s):
    """delta_nu(a_s u_alpha Z^2) for an array of s (planar norms).

    For norms that are monotone in each coordinate a shortest vector is always
    a convergent vector, so the minimum over convergents is exact; other norms
    go through lattice.delta on a convergent basis.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    root = math.sqrt(critical_value)
    if norm.is_euclidean:
        msq, _ = frame.euclidean_min_sq(s)
        return root * np.sqrt(msq)
    if _monotone(norm):
        frame._check(s)
        out = np.empty(s.shape[0])
        chunk = max(1, 2 ** 18 // len(frame))
        with np.errstate(over="ignore", invalid="ignore"):
            for lo in range(0, s.shape[0], chunk):
                ss = s[lo:lo + chunk, None]
                x = np.exp(ss) * frame.eps
                y = np.exp(-ss) * frame.qf
                x = np.where(frame.eps == 0.0, 0.0, x)
                vals = norms.evaluate(norm, np.stack([x, y], axis=-1))
                out[lo:lo + chunk] = np.nanmin(vals, axis=1)
        return root * out
    _, idx = frame.euclidean_min_sq(s)
    return np.array([lattice_delta(Lattice(frame.basis(si, int(k))), norm, critical_value)
                     for si, k in zip(s, idx)])


@dataclass(frozen=True, eq=False)
class FlowPoint:
    s: float
    lattice: Lattice
    delta: float


def a_matrix(s: float, m: int = 1, n: int = 1) -> np.ndarray:
    """a_s = diag(e^(s/m) I_m, e^(-s/n) I_n)."""
    return np.diag([math.exp(s / m)] * m + [math.exp(-s / n)] * n)


def b_matrix(psi: dani.PsiSpec, t: float) -> np.ndarray:
    """b_t = diag((t/psi)^(n/d) I_m, (psi/t)^(m/d) I_n)."""
    m, n, d = psi.m, psi.n, psi.d
    w = dani.psi_eval(psi, t)
    return np.diag([(t / w) ** (n / d)] * m + [(w / t) ** (m / d)] * n)


def u_matrix(A) -> np.ndarray:
    """u_A = [[I_m, A], [0, I_n]]."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m, n = A.shape
    u = np.eye(m + n)
    u[:m, m:] = A
    return u


def trajectory_delta(alpha, norm: norms.NormDescriptor, critical_value: float, s_grid) -> list[FlowPoint]:
    """delta_nu(a_s u_alpha Z^d) along an increasing grid of s.

    alpha is a real number (d = 2) or an m x n matrix (d = m + n <= 4, sup or
    Euclidean norm).  Each value comes from lattice.delta.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.ndim != 1 or np.any(np.diff(s_grid) <= 0):
        raise ValueError("s_grid must be strictly increasing")
    A = None
    if isinstance(alpha, np.ndarray) and alpha.size > 1:
        A = np.atleast_2d(alpha.astype(float))
    elif isinstance(alpha, (list, tuple)):
        A = np.atleast_2d(np.asarray(alpha, dtype=float))
        if A.size == 1:
            alpha, A = float(A[0, 0]), None
    elif isinstance(alpha, np.ndarray):
        alpha = float(alpha.reshape(-1)[0])
    out = []
    if A is None:
        if s_grid.size == 0:
            return out
        frame = ConvergentFrame(alpha, float(s_grid[-1]))
        _, idx = frame.euclidean_min_sq(s_grid)
        for s, k in zip(s_grid, idx):
            lat = Lattice(frame.basis(float(s), int(k)))
            out.append(FlowPoint(float(s), lat, lattice_delta(lat, norm, critical_value)))
        return out
    m, n = A.shape
    u = u_matrix(A)
    for s in s_grid:
        lat = Lattice(a_matrix(float(s), m, n) @ u)
        out.append(FlowPoint(float(s), lat, lattice_delta(lat, norm, critical_value)))
    return out


@dataclass(frozen=True)
class HitRecord:
    """Maximal s-interval with delta >= r(s) and the largest delta seen on it."""

    s_lo: float
    s_hi: float
    delta_max: float

    def to_dict(self) -> dict:
        return {"s_lo": self.s_lo, "s_hi": self.s_hi, "delta_max": self.delta_max}

    @classmethod
    def from_dict(cls, d: dict) -> "HitRecord":
        return cls(float(d["s_lo"]), float(d["s_hi"]), float(d["delta_max"]))


_RATE_CACHE: dict = {}


def _rate_on_grid(rate: dani.RateFunction, grid: np.ndarray, key) -> np.ndarray:
    if key not in _RATE_CACHE:
        if len(_RATE_CACHE) > 64:
            _RATE_CACHE.clear()
        _RATE_CACHE[key] = np.broadcast_to(np.asarray(rate(grid), dtype=float), grid.shape)
    return _RATE_CACHE[key]


def _scan(frame, norm, cv, rate, s0, S, h):
    n = int(math.floor((S - s0) / h + 1e-9))
    grid = s0 + h * np.arange(n + 1)
    if grid[-1] < S - 1e-12:
        grid = np.append(grid, S)
    r = _rate_on_grid(rate, grid, (rate.psi, s0, S, h))
    dl = delta_along(frame, norm, cv, grid)
    inside = dl >= r
    if not inside.any():
        return []

    def g(s):
        return float(delta_along(frame, norm, cv, [s])[0]) - float(rate(s))

    def edge(a, b):
        # a outside, b inside (either order); bisection on the crossing
        ga_in = g(a) >= 0
        for _ in range(60):
            if abs(b - a) <= 1e-10:
                break
            mid = 0.5 * (a + b)
            if (g(mid) >= 0) == ga_in:
                a = mid
            else:
                b = mid
        return b

    hits = []
    idx = np.nonzero(inside)[0]
    breaks = np.nonzero(np.diff(idx) > 1)[0]
    starts = np.concatenate([[idx[0]], idx[breaks + 1]])
    ends = np.concatenate([idx[breaks], [idx[-1]]])
    for i0, i1 in zip(starts, ends):
        lo = float(grid[i0]) if i0 == 0 else edge(float(grid[i0 - 1]), float(grid[i0]))
        hi = float(grid[i1]) if i1 == grid.size - 1 else edge(float(grid[i1 + 1]), float(grid[i1]))
        dmax = float(np.max(dl[i0:i1 + 1]))
        dmax = max(dmax, float(delta_along(frame, norm, cv, [lo])[0]),
                   float(delta_along(frame, norm, cv, [hi])[0]))
        hits.append(HitRecord(lo, hi, dmax))
    return hits


def _same_hits(a, b, tol=1e-8) -> bool:
    return len(a) == len(b) and all(
        abs(x.s_lo - y.s_lo) <= tol and abs(x.s_hi - y.s_hi) <= tol for x, y in zip(a, b))


def dirichlet_hits(alpha, psi: dani.PsiSpec, norm: norms.NormDescriptor, critical_value: float,
                   s_range, grid_step: float = 0.01, max_halvings: int = 6,
                   rate: dani.RateFunction | None = None, frame: ConvergentFrame | None = None):
    """Intervals of s in s_range where delta_nu(a_s u_alpha Z^2) >= r(s).

    The grid step is halved until two successive scans give the same hit list
    (or max_halvings is reached).
    """
    if (psi.m, psi.n) != (1, 1):
        raise ValueError("dirichlet_hits handles scalar alpha (m = n = 1)")
    s0, S = map(float, s_range)
    if not S > s0:
        raise ValueError("empty s range")
    if grid_step <= 0:
        raise ValueError("grid step must be positive")
    rate = rate or dani.dani_transform(psi)
    if s0 < rate.s_start - 1e-12:
        raise ValueError(f"r(s) is undefined below s = {rate.s_start}")
    if psi.family == dani.SCALED and psi.c ** (psi.m / psi.d) > 1 + 1e-9:
        return []   # the target is empty
    frame = frame if frame is not None and frame.s_max >= S else ConvergentFrame(alpha, S)
    h = float(grid_step)
    hits = _scan(frame, norm, critical_value, rate, s0, S, h)
    for _ in range(max_halvings):
        h /= 2
        finer = _scan(frame, norm, critical_value, rate, s0, S, h)
        if _same_hits(hits, finer):
            return finer
        hits = finer
    return hits


def check_report(hits, S: float, s_star: float) -> dict:
    """Summary used by the command line: hits, last hit, and whether none occur in [s_star, S]."""
    last = max((h.s_hi for h in hits), default=None)
    return {"hits": [h.to_dict() for h in hits], "last_hit": last, "S": S, "s_star": s_star,
            "dirichlet_up_to_S": all(h.s_hi < s_star for h in hits)}


def direct_check(alpha, t: float, psi: dani.PsiSpec, norm: norms.NormDescriptor,
                 critical_value: float) -> bool:
    """Is nu((alpha q - p)/psi(t), q/t) < Delta^(-1/2) solvable with 1 <= q?

    Scans every q up to the bound beyond which the vector is provably outside,
    and for each q every p that can possibly qualify (p = round(alpha q) for
    monotone norms).
    """
    if norm.dimension != 2:
        raise ValueError("direct_check is planar")
    w = float(dani.psi_eval(psi, t))
    a = float(to_fraction(alpha)) if not isinstance(alpha, float) else alpha
    k1, _ = norms.equivalence_constants(norm)
    radius = 1.0 / math.sqrt(critical_value)
    qmax = int(math.floor(t * radius / k1)) + 1
    q = np.arange(1, qmax + 1, dtype=float)
    spread = int(math.ceil(w * radius / k1)) + 1
    base = np.rint(a * q)
    x = (a * q - base)[:, None] - np.arange(-spread, spread + 1)[None, :]
    y = np.broadcast_to((q / t)[:, None], x.shape)
    vals = norms.evaluate(norm, np.stack([x / w, y], axis=-1))
    return bool(np.min(vals) < radius)
