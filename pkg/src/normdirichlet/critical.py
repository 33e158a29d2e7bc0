"""Critical determinants of planar norms via inscribed hexagons.

For a point p on the unit sphere C there is a unique q on C (moving
counterclockwise) with q - p also on C.  The lattice spanned by p and q is
admissible, and every critical lattice arises this way, so the critical
determinant is the minimum of det[p q] over the starting angle.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import norms

HEXAGON_SCAN = "HexagonScan"
PARALLELOGRAM_RULE = "ParallelogramRule"

GRID_POINTS = 720
REFINE_TOL = 1e-10
ROOT_TOL = 1e-12
CRITICAL_RTOL = 1e-6
_SCAN = 64
_FLAT = 1e-12   # |nu(q - p) - 1| below this counts as on the sphere


@dataclass(frozen=True)
class HexagonConfig:
    """p, q and r = q - p on the unit sphere; det_pq = det[p q]."""

    p: tuple
    q: tuple
    r: tuple
    det_pq: float
    t0: float = 0.0

    def to_dict(self) -> dict:
        return {"p": list(self.p), "q": list(self.q), "r": list(self.r),
                "det_pq": self.det_pq, "t0": self.t0}

    @classmethod
    def from_dict(cls, d: dict) -> "HexagonConfig":
        return cls(tuple(d["p"]), tuple(d["q"]), tuple(d["r"]), float(d["det_pq"]),
                   float(d.get("t0", 0.0)))


@dataclass(frozen=True)
class CriticalData:
    delta: float
    minimizing_config: HexagonConfig
    method: str
    ties: tuple = ()   # grid angles whose determinant is within 1e-8 of the minimum

    def to_dict(self) -> dict:
        return {"delta": self.delta, "minimizing_config": self.minimizing_config.to_dict(),
                "method": self.method, "ties": list(self.ties)}

    @classmethod
    def from_dict(cls, d: dict) -> "CriticalData":
        return cls(float(d["delta"]), HexagonConfig.from_dict(d["minimizing_config"]),
                   d["method"], tuple(d.get("ties", ())))


@dataclass(frozen=True)
class LocusEntry:
    t0: float
    config: HexagonConfig
    basis: np.ndarray
    is_critical: bool


def _radius_scalar(norm, theta: float) -> float:
    if norm.kind == norms.RADIAL:
        return float(norm._radial(theta % math.pi))
    return 1.0 / norms.gauge2(norm, math.cos(theta), math.sin(theta))


def _point(norm, theta: float):
    r = _radius_scalar(norm, theta)
    return r * math.cos(theta), r * math.sin(theta)


def hexagon_at(norm: norms.NormDescriptor, t0: float) -> HexagonConfig:
    """Hexagon configuration starting at p = boundary_point(t0)."""
    if norm.dimension != 2:
        raise ValueError("hexagon configurations are planar")
    px, py = _point(norm, t0)
    s = t0 + np.linspace(0.0, math.pi, _SCAN + 1)[1:]
    qs = norms.boundary_point(norm, s)
    f = norms.evaluate(norm, qs - np.array([px, py])) - 1.0
    above = np.nonzero(f >= -_FLAT)[0]
    if above.size == 0:
        raise RuntimeError(f"hexagon root not bracketed from t0={t0}: scanned values {f.tolist()}")
    state = np.sign(np.where(np.abs(f) <= 1e-9, 0.0, f))
    state = state[state != 0]
    changes = int(np.count_nonzero(np.diff(state))) + (1 if state.size and state[0] > 0 else 0)
    if changes > 1:
        warnings.warn(f"{changes} sign changes of nu(q - p) - 1 from t0={t0}; "
                      "taking the first root (is the body convex?)", RuntimeWarning)
    i = int(above[0])
    lo = t0 if i == 0 else float(s[i - 1])
    hi = float(s[i])
    while hi - lo > ROOT_TOL:
        mid = 0.5 * (lo + hi)
        qx, qy = _point(norm, mid)
        if norms.gauge2(norm, qx - px, qy - py) - 1.0 >= -_FLAT:
            hi = mid
        else:
            lo = mid
    qx, qy = _point(norm, hi)
    return HexagonConfig((px, py), (qx, qy), (qx - px, qy - py), px * qy - py * qx, float(t0))


def _golden_min(f, a: float, b: float, tol: float):
    invphi = (math.sqrt(5) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (c, fc) if fc < fd else (d, fd)


def critical_determinant(norm: norms.NormDescriptor) -> CriticalData:
    """Critical determinant by a 720-point scan plus golden-section refinement.

    Parallelograms are handled by the exact rule Delta = area / 4.
    """
    if norm.dimension != 2:
        raise ValueError("critical_determinant handles planar norms")
    if norms.is_parallelogram(norm):
        cfg = hexagon_at(norm, 0.1)
        return CriticalData(norms.unit_ball_area(norm) / 4.0, cfg, PARALLELOGRAM_RULE)
    ts = np.linspace(0.0, math.pi, GRID_POINTS, endpoint=False)
    configs = [hexagon_at(norm, float(t)) for t in ts]
    dets = np.array([c.det_pq for c in configs])
    best = min(configs, key=lambda c: c.det_pq)
    h = ts[1] - ts[0]
    for i in np.argsort(dets, kind="stable")[:3]:
        t, _ = _golden_min(lambda t: hexagon_at(norm, t).det_pq, ts[i] - h, ts[i] + h, REFINE_TOL)
        cfg = hexagon_at(norm, t)
        if cfg.det_pq < best.det_pq:
            best = cfg
    ties = tuple(float(t) for t in ts[dets <= best.det_pq + 1e-8])
    return CriticalData(best.det_pq, best, HEXAGON_SCAN, ties)


_KNOWN = {2: math.sqrt(3) / 2, 3: 1 / math.sqrt(2), 4: 0.5}


@lru_cache(maxsize=128)
def critical_value(norm: norms.NormDescriptor) -> float:
    """Delta_nu from the constant table (sup, Euclidean) or by computation."""
    if norm.is_sup:
        return 1.0
    if norm.is_euclidean:
        return _KNOWN[norm.dimension]
    return critical_determinant(norm).delta


def trace_critical_locus(norm: norms.NormDescriptor, n: int,
                         crit: CriticalData | None = None) -> list[LocusEntry]:
    """Hexagon configurations at n equispaced t0 in [0, pi) with scaled bases (1/sqrt(Delta))[p q]."""
    if crit is None:
        crit = critical_determinant(norm)
    out = []
    scale = 1.0 / math.sqrt(crit.delta)
    for t in np.linspace(0.0, math.pi, n, endpoint=False):
        cfg = hexagon_at(norm, float(t))
        basis = scale * np.array([[cfg.p[0], cfg.q[0]], [cfg.p[1], cfg.q[1]]])
        out.append(LocusEntry(float(t), cfg, basis, cfg.det_pq <= crit.delta * (1 + CRITICAL_RTOL)))
    return out
