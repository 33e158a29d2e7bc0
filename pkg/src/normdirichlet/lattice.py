"""Lattices given by a basis, shortest vectors under a norm, and the function delta."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import norms
from ._kernels import lagrange_reduce

UNIMODULAR_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Lattice:
    """Lattice spanned by the columns of a nonsingular d x d basis (2 <= d <= 4)."""

    basis: np.ndarray
    covolume: float = field(init=False)

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.ndim != 2 or b.shape[0] != b.shape[1] or not 2 <= b.shape[0] <= 4:
            raise ValueError("basis must be a square matrix of size 2..4")
        if not np.all(np.isfinite(b)):
            raise ValueError("basis has non-finite entries")
        det = float(np.linalg.det(b))
        if abs(det) <= 1e-12:
            raise ValueError(f"degenerate basis (|det| = {abs(det):.3g})")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)
        object.__setattr__(self, "covolume", abs(det))

    @property
    def dimension(self) -> int:
        return self.basis.shape[0]

    def is_unimodular(self, tol: float = UNIMODULAR_TOL) -> bool:
        return abs(self.covolume - 1.0) < tol

    def to_json(self) -> str:
        """Row-major JSON of the basis matrix (columns are generators)."""
        return json.dumps(self.basis.tolist())

    @classmethod
    def from_json(cls, text: str) -> "Lattice":
        text = text.strip()
        if not text.startswith("["):
            text = Path(text).read_text()
        return cls(np.array(json.loads(text), dtype=float))


@dataclass(frozen=True)
class ShortestVectorResult:
    vector: tuple   # integer coefficients in the given basis
    point: tuple    # basis @ vector
    length: float   # norm of point

    def to_dict(self) -> dict:
        return {"vector": list(self.vector), "point": list(self.point), "length": self.length}

    @classmethod
    def from_dict(cls, d: dict) -> "ShortestVectorResult":
        return cls(tuple(int(v) for v in d["vector"]), tuple(float(v) for v in d["point"]),
                   float(d["length"]))


def lll_reduce(basis, delta: float = 0.99):
    """Textbook LLL on the columns of a small basis. Returns (reduced, U) with reduced = basis @ U."""
    b = np.array(basis, dtype=float)
    d = b.shape[1]
    u = np.eye(d, dtype=np.int64)

    def gso(b):
        bs = np.zeros_like(b)
        mu = np.zeros((d, d))
        for i in range(d):
            v = b[:, i].copy()
            for j in range(i):
                mu[i, j] = b[:, i] @ bs[:, j] / (bs[:, j] @ bs[:, j])
                v -= mu[i, j] * bs[:, j]
            bs[:, i] = v
        return bs, mu

    k = 1
    bs, mu = gso(b)
    for _ in range(100000):
        if k >= d:
            return b, u
        for j in range(k - 1, -1, -1):
            m = round(mu[k, j])
            if m:
                b[:, k] -= m * b[:, j]
                u[:, k] -= m * u[:, j]
                bs, mu = gso(b)
        if bs[:, k] @ bs[:, k] >= (delta - mu[k, k - 1] ** 2) * (bs[:, k - 1] @ bs[:, k - 1]):
            k += 1
        else:
            b[:, [k - 1, k]] = b[:, [k, k - 1]]
            u[:, [k - 1, k]] = u[:, [k, k - 1]]
            bs, mu = gso(b)
            k = max(k - 1, 1)
    raise RuntimeError("LLL did not terminate")


def reduce_basis(lattice: Lattice):
    """Euclidean-reduced basis and the integer change of basis U (reduced = basis @ U)."""
    b = lattice.basis
    if lattice.dimension == 2:
        u1, u2, v1, v2, a, bb, c, dd = lagrange_reduce(b[0, 0], b[1, 0], b[0, 1], b[1, 1])
        red = np.array([[u1, v1], [u2, v2]])
        u = np.array([[a, bb], [c, dd]])
        return red, np.rint(u).astype(np.int64)
    return lll_reduce(b)


@lru_cache(maxsize=64)
def _half_box(d: int, radius: int) -> np.ndarray:
    """Integer vectors in [-R, R]^d whose first nonzero entry is positive."""
    axes = [np.arange(-radius, radius + 1)] * d
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    nz = grid != 0
    first = np.argmax(nz, axis=1)
    keep = nz.any(axis=1) & (grid[np.arange(grid.shape[0]), first] > 0)
    out = grid[keep]
    out.setflags(write=False)
    return out


def shortest_vector(lattice: Lattice, norm: norms.NormDescriptor) -> ShortestVectorResult:
    """Global minimizer of the norm over the nonzero lattice points.

    The basis is first reduced for the Euclidean norm; then every coefficient
    vector in a box large enough to contain all minimizers is enumerated.
    """
    d = lattice.dimension
    if norm.dimension != d:
        raise ValueError(f"norm dimension {norm.dimension} does not match lattice dimension {d}")
    if d > 2 and norm.kind not in (norms.SUP, norms.EUCLIDEAN):
        raise ValueError("only sup and Euclidean norms are supported above dimension 2")
    red, u = reduce_basis(lattice)
    if d == 2 and norm.is_euclidean:
        # a Lagrange-reduced basis starts with a Euclidean shortest vector
        coeff = np.array([1, 0])
    else:
        k1, k2 = norms.equivalence_constants(norm)
        lam = float(np.min(np.linalg.norm(red, axis=0)))
        row = float(np.max(np.linalg.norm(np.linalg.inv(red), axis=1)))
        box = int(math.ceil(k2 / k1 * lam * row)) + 1
        coeffs = _half_box(d, box)
        vals = norms.evaluate(norm, coeffs @ red.T)
        coeff = coeffs[int(np.argmin(vals))]
    point = red @ coeff
    vec = u @ coeff
    nz = np.abs(point) > 1e-12 * np.max(np.abs(point))
    if point[np.argmax(nz)] < 0:
        point, vec = -point, -vec
    length = float(norms.evaluate(norm, point))
    return ShortestVectorResult(tuple(int(v) for v in vec), tuple(float(x) for x in point), length)


def delta(lattice: Lattice, norm: norms.NormDescriptor, critical_value: float) -> float:
    """delta_nu(L) = Delta_nu^(1/d) * (length of a shortest nonzero vector)."""
    if not lattice.is_unimodular():
        raise ValueError(f"delta needs a unimodular lattice (covolume {lattice.covolume!r})")
    if critical_value <= 0:
        raise ValueError("critical value must be positive")
    return critical_value ** (1.0 / lattice.dimension) * shortest_vector(lattice, norm).length


def in_target(lattice: Lattice, norm: norms.NormDescriptor, critical_value: float, r: float) -> bool:
    """Membership in K_nu(r) = {delta >= r}; empty for r > 1."""
    if r <= 0:
        raise ValueError("target radius must be positive")
    if r > 1 + 1e-9:
        return False
    return delta(lattice, norm, critical_value) >= r


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def random_lattice(rng: np.random.Generator) -> Lattice:
    """Test sampler k a_s u_x Z^2 (k a uniform rotation, s ~ U[0,2], x ~ U[0,1)).

    Covers a wide band of shapes; it is not Haar measure.
    """
    theta = rng.uniform(0.0, 2 * math.pi)
    s = rng.uniform(0.0, 2.0)
    x = rng.uniform(0.0, 1.0)
    g = rotation(theta) @ np.array([[math.exp(s), math.exp(s) * x], [0.0, math.exp(-s)]])
    return Lattice(g)
