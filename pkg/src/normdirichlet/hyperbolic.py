"""Upper half-plane: Moebius action, reduction to the standard fundamental domain, distances.

Lattices correspond to points of the modular surface through z = g^(-1) i,
where g is a basis matrix; the hexagonal (critical) lattice sits at the corner
z0 = -1/2 + i sqrt(3)/2 of the fundamental domain.

>>> import numpy as np
>>> p = point_of_lattice(Lattice(np.diag([np.e, 1 / np.e])))
>>> round(p.z_reduced.y, 6), round(p.z_reduced.x, 6)
(7.389056, 0.0)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import Lattice

SQRT3_2 = math.sqrt(3) / 2
EUCLIDEAN_CRITICAL = SQRT3_2
MAX_STEPS = 10 ** 6
_EDGE = 1e-12


@dataclass(frozen=True)
class HalfPlanePoint:
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 1e-300:
            raise ValueError(f"point below the numeric floor of the half-plane (y = {self.y})")

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def of(cls, z) -> "HalfPlanePoint":
        if isinstance(z, HalfPlanePoint):
            return z
        z = complex(z)
        return cls(z.real, z.imag)


Z0 = HalfPlanePoint(-0.5, SQRT3_2)
Z0_RIGHT = HalfPlanePoint(0.5, SQRT3_2)


@dataclass(frozen=True)
class ReductionResult:
    """z_reduced = gamma . z with gamma in SL(2, Z); word lists the generators applied."""

    z_reduced: HalfPlanePoint
    gamma: tuple   # ((a, b), (c, d)) with Python ints
    steps: int
    word: tuple = ()

    def word_str(self) -> str:
        """The matrix gamma as a product of S and powers of T (leftmost acts last)."""
        parts = []
        for g in reversed(self.word):
            parts.append("S" if g == "S" else f"T^{g}")
        return " ".join(parts) if parts else "I"

    def to_dict(self) -> dict:
        return {"x": self.z_reduced.x, "y": self.z_reduced.y,
                "gamma": [list(r) for r in self.gamma], "steps": self.steps,
                "word": list(self.word)}

    @classmethod
    def from_dict(cls, d: dict) -> "ReductionResult":
        g = tuple(tuple(int(v) for v in r) for r in d["gamma"])
        return cls(HalfPlanePoint(float(d["x"]), float(d["y"])), g, int(d["steps"]),
                   tuple(d.get("word", ())))


def mobius(g, z) -> HalfPlanePoint:
    """(a z + b)/(c z + d) for g = [[a, b], [c, d]] of determinant 1."""
    g = np.asarray(g, dtype=float)
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    if abs(det - 1.0) > 1e-9:
        raise ValueError(f"mobius needs det g = 1 (got {det})")
    z = HalfPlanePoint.of(z).z
    den = g[1, 0] * z + g[1, 1]
    if abs(den) < 1e-300:
        raise ValueError("point sent to the cusp")
    w = complex((g[0, 0] * z + g[0, 1]) / den)
    return HalfPlanePoint(float(w.real), float(w.imag))


def _mul(A, B):
    return ((A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
            (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]))


def _exact_image(gamma, x: float, y: float) -> tuple[float, float]:
    """gamma . (x + iy) in exact rational arithmetic, rounded once."""
    (a, b), (c, d) = gamma
    X, Y = Fraction(x), Fraction(y)
    den = (c * X + d) ** 2 + c * c * Y * Y
    return float(((a * X + b) * (c * X + d) + a * c * Y * Y) / den), float(Y / den)


def reduce(z) -> ReductionResult:
    """Move z into D = {|x| <= 1/2, |z| >= 1}, preferring the left edge and left arc.

    The word is found in floating point; the reduced point is then recomputed
    from the exact matrix so that errors do not accumulate along the word.
    """
    p = HalfPlanePoint.of(z)
    gamma = ((1, 0), (0, 1))
    word = []
    x, y = p.x, p.y
    for _ in range(4):
        changed = False
        steps = 0
        while True:
            n = math.floor(x + 0.5)
            if n:
                x -= n
                gamma = _mul(((1, -n), (0, 1)), gamma)
                word.append(-n)
                changed = True
            r2 = x * x + y * y
            if r2 >= 1.0:
                break
            x, y = -x / r2, y / r2
            gamma = _mul(((0, -1), (1, 0)), gamma)
            word.append("S")
            changed = True
            steps += 1
            if steps > MAX_STEPS:
                raise RuntimeError("reduction exceeded the iteration cap (y underflow?)")
        if word:
            x, y = _exact_image(gamma, p.x, p.y)
        if not changed or (abs(x) <= 0.5 and x * x + y * y >= 1.0):
            break
    if x >= 0.5 - _EDGE:
        gamma = _mul(((1, -1), (0, 1)), gamma)
        word.append(-1)
        x, y = _exact_image(gamma, p.x, p.y)
    if x > 0 and x * x + y * y <= 1.0 + _EDGE:
        gamma = _mul(((0, -1), (1, 0)), gamma)
        word.append("S")
        x, y = _exact_image(gamma, p.x, p.y)
    return ReductionResult(HalfPlanePoint(x + 0.0, y), gamma, len(word), tuple(word))


def hyperbolic_distance(z, w) -> float:
    z, w = HalfPlanePoint.of(z), HalfPlanePoint.of(w)
    return 2.0 * math.asinh(abs(z.z - w.z) / (2.0 * math.sqrt(z.y * w.y)))


def _oriented(basis: np.ndarray) -> np.ndarray:
    g = np.array(basis, dtype=float)
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    if det < 0:
        g[:, 1] = -g[:, 1]
        det = -det
    return g / math.sqrt(det)


def point_of_lattice(lat: Lattice) -> ReductionResult:
    """Reduced representative of g^(-1) i for a basis g of the planar lattice."""
    if lat.dimension != 2:
        raise ValueError("point_of_lattice needs a planar lattice")
    g = _oriented(lat.basis)
    ginv = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]])
    return reduce(mobius(ginv, 1j))


def lattice_of_point(z) -> Lattice:
    """Unimodular lattice g Z^2 with g^(-1) i = z (upper-triangular g)."""
    p = HalfPlanePoint.of(z)
    r = math.sqrt(p.y)
    return Lattice(np.array([[1.0 / r, -p.x / r], [0.0, r]]))


def height_criterion(lat: Lattice, r: float) -> bool:
    """Im(reduced point) <= Delta / r^2, with Delta = sqrt(3)/2 (Euclidean)."""
    if not 0 < r <= 1 + 1e-12:
        raise ValueError("height criterion needs 0 < r <= 1")
    # relative slack 1e-12 so that boundary lattices such as the critical one count as inside
    return point_of_lattice(lat).z_reduced.y <= EUCLIDEAN_CRITICAL / (r * r) * (1 + 1e-12)


def distance_to_critical(lat: Lattice) -> float:
    """Hyperbolic distance from the lattice's point to the orbit of z0."""
    z = point_of_lattice(lat).z_reduced
    return min(hyperbolic_distance(z, Z0), hyperbolic_distance(z, Z0_RIGHT))


def orbit_point_exact(gamma) -> tuple[Fraction, int]:
    """Re(gamma z0) as an exact fraction and the integer N with Im(gamma z0) = (sqrt3/2)/N.

    Uses Re((a z + b)(c conj(z) + d)) / |c z + d|^2 with |z0| = 1, Re z0 = -1/2.
    """
    (a, b), (c, d) = gamma
    if a * d - b * c != 1:
        raise ValueError("gamma must have determinant 1")
    re_z, abs2 = Fraction(-1, 2), 1
    num = a * c * abs2 + (a * d + b * c) * re_z + b * d
    den = c * c * abs2 + 2 * c * d * re_z + d * d
    return num / den, int(den)


def real_part_formula(gamma) -> Fraction:
    """(ac + bd - (ad + bc)/2) / (c^2 - cd + d^2)."""
    (a, b), (c, d) = gamma
    return Fraction(2 * (a * c + b * d) - (a * d + b * c), 2 * (c * c - c * d + d * d))
