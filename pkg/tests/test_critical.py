import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normdirichlet import critical, norms
from normdirichlet.critical import CriticalData, HexagonConfig
from normdirichlet.lattice import Lattice, delta, shortest_vector

EUC, SUP, L1, L3 = norms.euclidean(), norms.sup(), norms.lp(1), norms.lp(3)
HEX = norms.polygon([[1, 0], [0.5, 0.9], [-0.4, 0.8]])
SMOOTH = {"euclidean": EUC, "l3": L3, "l1.5": norms.lp(1.5), "hexagon": HEX, "sup": SUP, "l1": L1}


def test_hexagon_examples():
    c = critical.hexagon_at(EUC, math.pi / 2)
    assert np.allclose(c.p, (0, 1), atol=1e-12)
    assert np.allclose(c.q, (-math.sqrt(3) / 2, 0.5), atol=1e-10)
    assert c.det_pq == pytest.approx(math.sqrt(3) / 2, abs=1e-10)
    c = critical.hexagon_at(L1, 0.0)
    assert np.allclose(c.q, (0.5, 0.5), atol=1e-10) and c.det_pq == pytest.approx(0.5, abs=1e-10)
    c = critical.hexagon_at(SUP, 1e-6)
    assert np.allclose(c.q, (0, 1), atol=1e-5) and c.det_pq == pytest.approx(1, abs=1e-5)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(SMOOTH)), st.floats(0, 2 * math.pi))
def test_hexagon_invariants(name, t0):
    nu = SMOOTH[name]
    c = critical.hexagon_at(nu, t0)
    for v in (c.p, c.q, c.r):
        assert norms.evaluate(nu, v) == pytest.approx(1, abs=1e-9)
    assert c.r == (c.q[0] - c.p[0], c.q[1] - c.p[1])
    assert c.det_pq > 0


@pytest.mark.parametrize("nu,expected", [(EUC, math.sqrt(3) / 2), (SUP, 1.0), (L1, 0.5)])
def test_critical_values(nu, expected):
    t = time.perf_counter()
    assert critical.critical_determinant(nu).delta == pytest.approx(expected, abs=1e-6)
    assert time.perf_counter() - t < 2


def test_methods_and_ties():
    assert critical.critical_determinant(SUP).method == critical.PARALLELOGRAM_RULE
    data = critical.critical_determinant(EUC)
    assert data.method == critical.HEXAGON_SCAN
    assert len(data.ties) == critical.GRID_POINTS   # every rotation of the disk is critical


@pytest.mark.parametrize("name", ["euclidean", "l3", "l1.5", "hexagon"])
def test_critical_lattice_is_admissible(name):
    nu = SMOOTH[name]
    data = critical.critical_determinant(nu)
    cfg = data.minimizing_config
    lat = Lattice(np.array([[cfg.p[0], cfg.q[0]], [cfg.p[1], cfg.q[1]]]))
    assert shortest_vector(lat, nu).length >= 1 - 1e-8
    assert lat.covolume == pytest.approx(data.delta, rel=1e-12)


@pytest.mark.parametrize("name", ["euclidean", "l3", "hexagon", "sup", "l1"])
def test_minkowski_lower_bound(name):
    nu = SMOOTH[name]
    assert critical.critical_determinant(nu).delta >= norms.polar_area(nu) / 4 - 1e-6


def test_scaling_law():
    th = np.linspace(0, math.pi, 64, endpoint=False)
    disk2 = norms.radial(th, np.full(th.size, 2.0))
    assert critical.critical_determinant(disk2).delta == pytest.approx(4 * math.sqrt(3) / 2, abs=1e-8)


def test_locus_euclidean():
    locus = critical.trace_critical_locus(EUC, 8)
    assert len(locus) == 8
    for e in locus:
        assert e.config.det_pq == pytest.approx(math.sqrt(3) / 2, abs=1e-8)
        assert e.is_critical
        assert delta(Lattice(e.basis), EUC, math.sqrt(3) / 2) == pytest.approx(1, abs=1e-8)
    # rotating t0 rotates the basis
    a, b = locus[0], locus[3]
    phi = b.t0 - a.t0
    k = np.array([[math.cos(phi), -math.sin(phi)], [math.sin(phi), math.cos(phi)]])
    assert np.allclose(k @ a.basis, b.basis, atol=1e-8)


def test_locus_sup():
    locus = critical.trace_critical_locus(SUP, 8)
    for e in locus:
        assert e.config.det_pq == pytest.approx(1, abs=1e-8) and e.is_critical
        # critical sup lattices contain (1, x) or (x, 1) type vectors on the square boundary
        assert shortest_vector(Lattice(e.basis), SUP).length == pytest.approx(1, abs=1e-8)


def test_locus_admissibility():
    for nu in (L3, HEX):
        for e in critical.trace_critical_locus(nu, 12):
            lat = Lattice(np.array([[e.config.p[0], e.config.q[0]], [e.config.p[1], e.config.q[1]]]))
            assert shortest_vector(lat, nu).length >= 1 - 1e-8


def _brute_force_critical(nu, n1=16, n2=48, box=10):
    """Smallest admissible determinant over bases [x(t1), c x(t2)], by coefficient scan.

    Angles between the generators stay in [pi/3 - 0.05, 2 pi/3 + 0.05], where a
    reduced basis of every lattice can be found, so the box [-10, 10]^2 holds
    every short vector.
    """
    t1 = np.linspace(0, math.pi / 2, n1, endpoint=False)
    t2 = np.linspace(math.pi / 3 - 0.05, 2 * math.pi / 3 + 0.05, n2)
    T1, T2 = np.meshgrid(t1, t2, indexing="ij")
    T1, T2 = T1.ravel(), T1.ravel() + T2.ravel()
    p = norms.boundary_point(nu, T1)
    q = norms.boundary_point(nu, T2)
    ax = np.arange(-box, box + 1)
    ij = np.stack(np.meshgrid(ax, ax, indexing="ij"), -1).reshape(-1, 2)
    ij = ij[np.any(ij != 0, axis=1)].astype(float)
    lo, hi = np.full(T1.size, 0.5), np.full(T1.size, 2.0)
    for _ in range(45):
        c = 0.5 * (lo + hi)
        pts = ij[None, :, 0:1] * p[:, None, :] + ij[None, :, 1:2] * (c[:, None, None] * q[:, None, :])
        ok = np.min(norms.evaluate(nu, pts), axis=1) >= 1 - 1e-12
        hi = np.where(ok, c, hi)
        lo = np.where(ok, lo, c)
    dets = hi * np.abs(p[:, 0] * q[:, 1] - p[:, 1] * q[:, 0])
    return float(np.min(dets))


@pytest.mark.parametrize("nu", [EUC, L3], ids=["euclidean", "l3"])
def test_independent_brute_force_oracle(nu):
    oracle = _brute_force_critical(nu)
    got = critical.critical_determinant(nu).delta
    assert oracle >= got - 1e-9          # no admissible lattice below the computed value
    assert oracle <= got * 1.01          # and the grid comes close to it


def test_frozen_regressions():
    # computed once by the hexagon scan, cross-checked against the brute-force oracle above
    assert critical.critical_determinant(L3).delta == pytest.approx(0.952969840067501, abs=1e-9)
    assert critical.critical_determinant(norms.lp(1.5)).delta == pytest.approx(0.74042527486, abs=1e-9)


def test_critical_value_table():
    assert critical.critical_value(norms.euclidean(3)) == pytest.approx(1 / math.sqrt(2))
    assert critical.critical_value(norms.euclidean(4)) == 0.5
    assert critical.critical_value(norms.sup(4)) == 1.0


def test_round_trip():
    data = critical.critical_determinant(L3)
    assert CriticalData.from_dict(data.to_dict()) == data
    cfg = data.minimizing_config
    assert HexagonConfig.from_dict(cfg.to_dict()) == cfg


def test_planar_only():
    with pytest.raises(ValueError):
        critical.critical_determinant(norms.sup(3))
