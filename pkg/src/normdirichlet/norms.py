"""Symmetric convex norms on the plane (and sup/Euclidean norms up to dimension 4).

A norm is described by an immutable :class:`NormDescriptor`.  Everything the
rest of the package needs from a norm goes through three functions:
:func:`evaluate` (the gauge), :func:`boundary_point` (polar parametrization of
the unit sphere) and :func:`equivalence_constants` (comparison with the
Euclidean norm).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import gamma as _gamma

SUP = "sup"
EUCLIDEAN = "euclidean"
LP = "lp"
POLYGON = "polygon"
RADIAL = "radial"
KINDS = (SUP, EUCLIDEAN, LP, POLYGON, RADIAL)

MIN_RADIAL_SAMPLES = 8
_GRID = 4096


@dataclass(frozen=True)
class NormDescriptor:
    """Immutable description of a norm.

    kind is one of 'sup', 'euclidean', 'lp', 'polygon', 'radial'.  Polygons
    store the full centrally symmetric vertex list in counterclockwise order;
    radial bodies store samples of the radial function on [0, pi).
    """

    kind: str
    dimension: int = 2
    p: float | None = None
    vertices: tuple | None = None
    angles: tuple | None = None
    radii: tuple | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind in (SUP, EUCLIDEAN):
            if not 2 <= self.dimension <= 4:
                raise ValueError("sup/euclidean norms support dimension 2..4")
        elif self.dimension != 2:
            raise ValueError(f"{self.kind} norms are planar (dimension 2)")
        if self.kind == LP:
            if self.p is None or not (self.p >= 1.0):
                raise ValueError("lp norm needs p >= 1")
        if self.kind == POLYGON:
            self._facets  # validates convexity
        if self.kind == RADIAL:
            if self.angles is None or self.radii is None:
                raise ValueError("radial norm needs angles and radii")
            if len(self.angles) < MIN_RADIAL_SAMPLES:
                raise ValueError(
                    f"radial norm needs at least {MIN_RADIAL_SAMPLES} angles, got {len(self.angles)}")
            if len(self.angles) != len(self.radii):
                raise ValueError("angles and radii differ in length")
            a = np.asarray(self.angles, dtype=float)
            if np.any(np.diff(a) <= 0) or a[0] < 0 or a[-1] >= math.pi:
                raise ValueError("radial angles must be strictly increasing in [0, pi)")
            if np.any(np.asarray(self.radii, dtype=float) <= 0):
                raise ValueError("radial radii must be positive")
            _check_radial_convex(self)

    # derived data, computed lazily and cached on the instance
    @cached_property
    def _facets(self):
        """Rows n_i / h_i so that the polygon gauge is max_i <row_i, x>."""
        v = np.asarray(self.vertices, dtype=float)
        edges = np.roll(v, -1, axis=0) - v
        normals = np.stack([edges[:, 1], -edges[:, 0]], axis=1)
        h = np.einsum("ij,ij->i", normals, v)
        if np.any(h <= 0):
            raise ValueError("polygon must contain the origin in its interior")
        return normals / h[:, None]

    @cached_property
    def _radial(self):
        # periodic C2 spline of the radial function (period pi by central symmetry)
        a = np.asarray(self.angles, dtype=float)
        r = np.asarray(self.radii, dtype=float)
        return CubicSpline(np.append(a, a[0] + math.pi), np.append(r, r[0]), bc_type="periodic",
                           extrapolate="periodic")

    @property
    def is_euclidean(self) -> bool:
        return self.kind == EUCLIDEAN or (self.kind == LP and self.p == 2.0)

    @property
    def is_sup(self) -> bool:
        return self.kind == SUP or (self.kind == LP and math.isinf(self.p))

    def to_dict(self) -> dict:
        if self.kind in (SUP, EUCLIDEAN):
            return {"kind": self.kind, "dimension": self.dimension}
        if self.kind == LP:
            return {"kind": LP, "p": "inf" if math.isinf(self.p) else self.p}
        if self.kind == POLYGON:
            return {"kind": POLYGON, "vertices": [list(v) for v in self.vertices]}
        return {"kind": RADIAL, "angles": list(self.angles), "radii": list(self.radii)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def sup(dimension: int = 2) -> NormDescriptor:
    return NormDescriptor(SUP, dimension)


def euclidean(dimension: int = 2) -> NormDescriptor:
    return NormDescriptor(EUCLIDEAN, dimension)


def lp(p: float) -> NormDescriptor:
    return NormDescriptor(LP, 2, p=float(p))


def polygon(vertices) -> NormDescriptor:
    """Polygon from counterclockwise vertices of one half (mirrored through 0).

    A list that is already centrally symmetric is used as is.
    """
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 2:
        raise ValueError("polygon vertices must be a list of at least two 2-vectors")
    k = v.shape[0]
    symmetric = k % 2 == 0 and k >= 4 and np.allclose(v[k // 2:], -v[:k // 2], atol=1e-12)
    full = v if symmetric else np.concatenate([v, -v])
    full = _prune_polygon(full)
    return NormDescriptor(POLYGON, 2, vertices=tuple(tuple(map(float, p)) for p in full))


def radial(angles, radii) -> NormDescriptor:
    return NormDescriptor(RADIAL, 2, angles=tuple(map(float, angles)),
                          radii=tuple(map(float, radii)))


def _prune_polygon(v):
    """Drop repeated and collinear vertices, then check strict convexity (CCW)."""
    pts = [v[0]]
    for p in v[1:]:
        if np.linalg.norm(p - pts[-1]) > 1e-14:
            pts.append(p)
    if np.linalg.norm(pts[0] - pts[-1]) <= 1e-14:
        pts.pop()
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        for i in range(len(pts)):
            a, b, c = pts[i - 1], pts[i], pts[(i + 1) % len(pts)]
            cr = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
            scale = np.linalg.norm(b - a) * np.linalg.norm(c - b)
            if abs(cr) <= 1e-12 * scale and np.dot(b - a, c - b) > 0:
                pts.pop(i)
                changed = True
                break
    pts = np.asarray(pts)
    n = len(pts)
    if n < 4:
        raise ValueError("polygon is degenerate")
    turn = 0.0
    for i in range(n):
        e1 = pts[(i + 1) % n] - pts[i]
        e2 = pts[(i + 2) % n] - pts[(i + 1) % n]
        cr = e1[0] * e2[1] - e1[1] * e2[0]
        if cr <= 0:
            raise ValueError("polygon vertices must be convex and counterclockwise")
        turn += math.atan2(cr, float(np.dot(e1, e2)))
    if abs(turn - 2 * math.pi) > 1e-6:
        raise ValueError("polygon vertices wind more than once")
    return pts


def _check_radial_convex(norm: NormDescriptor):
    """Reject radial samples whose interpolated body is not convex."""
    th = np.linspace(0.0, 2 * math.pi, _GRID, endpoint=False)
    r = norm._radial(np.mod(th, math.pi))
    if np.any(r <= 0):
        raise ValueError("interpolated radial function is not positive")
    pts = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    e1 = np.roll(pts, -1, axis=0) - pts
    e2 = np.roll(e1, -1, axis=0)
    cr = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    scale = np.linalg.norm(e1, axis=1) * np.linalg.norm(e2, axis=1)
    if np.any(cr < -1e-9 * scale):
        bad = th[np.argmin(cr / scale)]
        raise ValueError(f"radial samples do not bound a convex body (dent near angle {bad:.4f})")


def from_dict(d: dict) -> NormDescriptor:
    if not isinstance(d, dict) or "kind" not in d:
        raise ValueError("norm descriptor needs a 'kind' field")
    kind = str(d["kind"]).lower()
    if kind in ("sup", "max", "linf"):
        return sup(int(d.get("dimension", 2)))
    if kind in ("euclidean", "l2"):
        return euclidean(int(d.get("dimension", 2)))
    if int(d.get("dimension", 2)) != 2:
        raise ValueError(f"{kind} norms are planar (dimension 2)")
    if kind == LP:
        p = d.get("p")
        if p is None:
            raise ValueError("lp norm needs p")
        return lp(float(p))
    if kind == POLYGON:
        return polygon(d["vertices"])
    if kind == RADIAL:
        return radial(d["angles"], d["radii"])
    raise ValueError(f"unknown norm kind {kind!r}")


def from_json(text: str) -> NormDescriptor:
    """Parse inline JSON or the path of a JSON file."""
    text = text.strip()
    if not text.startswith("{"):
        text = Path(text).read_text()
    return from_dict(json.loads(text))


def evaluate(norm: NormDescriptor, x):
    """Gauge of x (shape (..., d)) with respect to the unit ball of norm."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != norm.dimension:
        raise ValueError(f"expected vectors of dimension {norm.dimension}, got {x.shape[-1]}")
    kind = norm.kind
    if kind == SUP:
        return np.max(np.abs(x), axis=-1)
    if kind == EUCLIDEAN:
        return np.sqrt(np.sum(x * x, axis=-1)) if norm.dimension > 2 else np.hypot(x[..., 0], x[..., 1])
    if kind == LP:
        a = np.abs(x)
        p = norm.p
        if math.isinf(p):
            return np.max(a, axis=-1)
        if p == 1.0:
            return a[..., 0] + a[..., 1]
        if p == 2.0:
            return np.hypot(x[..., 0], x[..., 1])
        m = np.max(a, axis=-1)
        safe = np.where(m > 0, m, 1.0)
        with np.errstate(under="ignore"):
            s = np.sum((a / safe[..., None]) ** p, axis=-1)
        return np.where(m > 0, m * s ** (1.0 / p), 0.0)
    if kind == POLYGON:
        return np.max(x @ norm._facets.T, axis=-1)
    # radial
    th = np.mod(np.arctan2(x[..., 1], x[..., 0]), math.pi)
    return np.hypot(x[..., 0], x[..., 1]) / norm._radial(th)


def gauge2(norm: NormDescriptor, x: float, y: float) -> float:
    """Scalar planar gauge; a fast path for tight loops."""
    kind = norm.kind
    if kind == EUCLIDEAN or (kind == LP and norm.p == 2.0):
        return math.hypot(x, y)
    if kind == SUP or (kind == LP and math.isinf(norm.p)):
        return max(abs(x), abs(y))
    if kind == LP:
        if norm.p == 1.0:
            return abs(x) + abs(y)
        ax, ay = abs(x), abs(y)
        m = max(ax, ay)
        if m == 0.0:
            return 0.0
        return m * ((ax / m) ** norm.p + (ay / m) ** norm.p) ** (1.0 / norm.p)
    if kind == POLYGON:
        f = norm._facets
        return float(np.max(f[:, 0] * x + f[:, 1] * y))
    th = math.atan2(y, x) % math.pi
    return math.hypot(x, y) / float(norm._radial(th))


def radius(norm: NormDescriptor, theta):
    """Radial function r_theta: distance from 0 to the unit sphere in direction theta."""
    if norm.dimension != 2:
        raise ValueError("boundary parametrization is planar")
    theta = np.asarray(theta, dtype=float)
    if norm.kind == RADIAL:
        return norm._radial(np.mod(theta, math.pi))
    d = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    return 1.0 / evaluate(norm, d)


def boundary_point(norm: NormDescriptor, theta):
    """r_theta (cos theta, sin theta); vectorized over theta."""
    theta = np.asarray(theta, dtype=float)
    r = radius(norm, theta)
    return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)


def equivalence_constants(norm: NormDescriptor) -> tuple[float, float]:
    """(k1, k2) with k1 |x|_2 <= nu(x) <= k2 |x|_2 for all x.

    Exact for sup, Euclidean, lp and polygons; radial bodies use a 4096-angle
    grid with the bounds pushed outward by 1%.
    """
    kind = norm.kind
    if norm.is_euclidean:
        return 1.0, 1.0
    if norm.is_sup:
        return 1.0 / math.sqrt(norm.dimension), 1.0
    if kind == LP:
        c = 2.0 ** (1.0 / norm.p - 0.5)
        return (c, 1.0) if norm.p >= 2 else (1.0, c)
    if kind == POLYGON:
        v = np.asarray(norm.vertices)
        k1 = 1.0 / float(np.max(np.hypot(v[:, 0], v[:, 1])))
        k2 = float(np.max(np.hypot(norm._facets[:, 0], norm._facets[:, 1])))
        return k1, k2
    th = np.linspace(0.0, math.pi, _GRID, endpoint=False)
    inv = 1.0 / radius(norm, th)
    return 0.99 * float(inv.min()), 1.01 * float(inv.max())


def unit_ball_area(norm: NormDescriptor) -> float:
    """Area of the planar unit ball (closed form where available)."""
    if norm.dimension != 2:
        raise ValueError("area is computed for planar norms only")
    if norm.is_euclidean:
        return math.pi
    if norm.is_sup:
        return 4.0
    if norm.kind == LP:
        p = norm.p
        return 4.0 * _gamma(1 + 1 / p) ** 2 / _gamma(1 + 2 / p)
    if norm.kind == POLYGON:
        v = np.asarray(norm.vertices)
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    return polar_area(norm, 200000)


def polar_area(norm: NormDescriptor, n: int = 10 ** 6) -> float:
    """Area of the unit ball by the periodic trapezoid rule on (1/2) r_theta^2."""
    th = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    r = radius(norm, th)
    return float(0.5 * np.sum(r * r) * (2 * math.pi / n))


def is_parallelogram(norm: NormDescriptor) -> bool:
    """True when the unit ball is a parallelogram (square, l1 diamond, 4-gon)."""
    if norm.dimension != 2:
        return False
    if norm.is_sup or (norm.kind == LP and norm.p == 1.0):
        return True
    return norm.kind == POLYGON and len(norm.vertices) == 4
