"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line before asserting."""
import math
import os
import time

import numpy as np
import pytest

from conftest import DELTA2, G0
from normdirichlet import critical, dani, experiments, flow, hyperbolic as H, norms
from normdirichlet.lattice import Lattice, delta, in_target, random_lattice

EUC = norms.euclidean()


# 1 ----------------------------------------------------------------------------

def test_acceptance_01_critical_determinants(acceptance):
    cases = [("euclidean", EUC, math.sqrt(3) / 2), ("sup", norms.sup(), 1.0), ("l1", norms.lp(1), 0.5)]
    details, ok = [], True
    for name, nu, want in cases:
        t = time.perf_counter()
        got = critical.critical_determinant(nu).delta
        dt = time.perf_counter() - t
        good = abs(got - want) <= 1e-6 and dt < 2
        ok &= good
        details.append(f"{name}={got:.10f} ({dt:.2f}s)")
    acceptance(1, ok, "; ".join(details))
    assert ok


# 2 ----------------------------------------------------------------------------

def test_acceptance_02_critical_lattice(acceptance):
    d = delta(Lattice(G0), EUC, DELTA2)
    z = H.point_of_lattice(Lattice(G0)).z_reduced
    err = abs(z.z - complex(-0.5, math.sqrt(3) / 2))
    ok = abs(d - 1) <= 1e-9 and err <= 1e-9
    acceptance(2, ok, f"delta={d:.15f}, |z - z0|={err:.2e}")
    assert ok


# 3 ----------------------------------------------------------------------------

def test_acceptance_03_rate_function(acceptance):
    worst_scaled = 0.0
    for c in (0.25, 0.6, 0.9, 1.0):
        rate = dani.dani_transform(dani.scaled(c))
        s = np.linspace(rate.s_start, rate.s_start + 60, 100)
        worst_scaled = max(worst_scaled, float(np.max(np.abs(rate(s) - math.sqrt(c)))))
    ts = np.geomspace(1, 1e15, 400)
    rate = dani.dani_transform(dani.tabulated(ts, ts ** -2.0))
    s = np.linspace(rate.s_start, 1.5 * math.log(1e15) - 1, 100)
    worst_square = float(np.max(np.abs(rate(s) - np.exp(-s / 3))))
    rng = np.random.default_rng(3)
    worst_matrix = 0.0
    for (c, m, n) in ((1.0, 1, 1), (0.7, 2, 1), (0.5, 1, 2), (0.9, 2, 2)):
        psi = dani.scaled(c, m, n)
        for t in np.exp(rng.uniform(math.log(2), math.log(1e8), 25)):
            b = flow.b_matrix(psi, t)
            a = flow.a_matrix(dani.s_of_t(psi, t), m, n)
            worst_matrix = max(worst_matrix, float(np.max(np.abs(b - a) / np.abs(a).max())))
    ok = worst_scaled < 1e-9 and worst_square <= 1e-9 and worst_matrix <= 1e-12
    acceptance(3, ok, f"scaled dev={worst_scaled:.1e}, 1/t^2 dev={worst_square:.1e}, "
                      f"b_t vs a_s rel={worst_matrix:.1e} (100 t)")
    assert ok


# 4 ----------------------------------------------------------------------------

def test_acceptance_04_height_equivalence(acceptance):
    rng = np.random.default_rng(4)
    t0 = time.perf_counter()
    bad = checked = 0
    for _ in range(10_000):
        lat = random_lattice(rng)
        d = delta(lat, EUC, DELTA2)
        for r in (0.8, 0.9, 0.95, 0.99):
            if abs(d - r) < 1e-6:
                continue
            checked += 1
            bad += H.height_criterion(lat, r) != in_target(lat, EUC, DELTA2, r)
    dt = time.perf_counter() - t0
    ok = bad == 0 and dt < 30
    acceptance(4, ok, f"{bad} disagreements in {checked} comparisons ({dt:.1f}s)")
    assert ok


# 5 ----------------------------------------------------------------------------

def test_acceptance_05_perturbation_inequality(acceptance):
    rng = np.random.default_rng(5)
    t0 = time.perf_counter()
    worst = -math.inf
    for _ in range(10_000):
        lat = random_lattice(rng)
        y = rng.uniform(-1, 1)
        s = rng.uniform(0, 5)
        a = flow.a_matrix(s)
        w = np.array([[1.0, 0.0], [y, 1.0]])
        d_plain = delta(Lattice(a @ lat.basis), EUC, DELTA2)
        d_pert = delta(Lattice(a @ w @ lat.basis), EUC, DELTA2)
        f = 1 + abs(y) * math.exp(-2 * s)
        worst = max(worst, d_pert - f * d_plain, d_plain - f * d_pert)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and dt < 30
    acceptance(5, ok, f"max violation {worst:.2e} (slack 1e-9, {dt:.1f}s)")
    assert ok


# 6 ----------------------------------------------------------------------------

def _ray_point(theta, rho):
    """Point at hyperbolic distance rho from z0 in direction theta."""
    x0, y0 = H.Z0.x, H.Z0.y
    m = np.array([[math.sqrt(y0), x0 / math.sqrt(y0)], [0.0, 1 / math.sqrt(y0)]])
    k = np.array([[math.cos(theta), math.sin(theta)], [-math.sin(theta), math.cos(theta)]])
    return H.mobius(m @ k, complex(0.0, math.exp(rho)))


def _delta_at(z):
    return delta(H.lattice_of_point(z.z), EUC, DELTA2)


def test_acceptance_06_ball_sandwich(acceptance):
    c0, c0p, n = 1.8, 2.2, 1000
    t0 = time.perf_counter()
    inner_bad, outer_bad, worst_outer = 0, 0, 0.0
    for eps in (1e-2, 1e-3):
        for theta in np.linspace(0, 2 * math.pi, n, endpoint=False):
            # inner ball: the sphere of radius c0 eps lies in K(1 - eps)
            inner_bad += _delta_at(_ray_point(theta, c0 * eps)) < 1 - eps
            # outer ball: the last point of K(1 - eps) along the ray, found by bisection.
            # To first order this point sits at distance up to 4 eps (where the
            # height level Delta/r^2 meets the unit circle), so c0' = 2.2 is too small.
            lo, hi = 0.0, 20 * eps
            assert _delta_at(_ray_point(theta, hi)) < 1 - eps
            for _ in range(50):
                mid = 0.5 * (lo + hi)
                if _delta_at(_ray_point(theta, mid)) >= 1 - eps:
                    lo = mid
                else:
                    hi = mid
            lat = H.lattice_of_point(_ray_point(theta, lo).z)
            dist = H.distance_to_critical(lat)
            worst_outer = max(worst_outer, dist / eps)
            outer_bad += dist > c0p * eps
    dt = time.perf_counter() - t0
    ok = inner_bad == 0 and outer_bad == 0 and dt < 60
    acceptance(6, ok, f"inner c0={c0}: {inner_bad} violations; outer c0'={c0p}: {outer_bad} violations, "
                      f"largest distance/eps on the boundary of K(1-eps) = {worst_outer:.3f} ({dt:.1f}s)")
    assert ok


# 7 ----------------------------------------------------------------------------

def test_acceptance_07_dirichlet_for_all_large_t(acceptance):
    psi = dani.scaled(1.0)
    t_grid = np.geomspace(2, 1e3, 60)
    t0 = time.perf_counter()
    failures = []
    for i in range(100):
        alpha = experiments.random_alpha(7, i, 64)
        for t in t_grid:
            if not flow.direct_check(alpha, float(t), psi, EUC, DELTA2):
                failures.append((i, float(t)))
    dt = time.perf_counter() - t0
    ok = not failures and dt < 60
    acceptance(7, ok, f"{len(failures)} failures over 100 alpha x {t_grid.size} t in [2, 1e3] ({dt:.1f}s)")
    assert ok


# 8 ----------------------------------------------------------------------------

def test_acceptance_08_oracle_equivalence(acceptance):
    rng = np.random.default_rng(8)
    psis = [dani.scaled(0.9), dani.scaled(0.5), dani.loggap(1), dani.powergap(1)]
    rates = [dani.dani_transform(p) for p in psis]
    t0 = time.perf_counter()
    bad = banded = inside = 0
    for _ in range(1000):
        j = int(rng.integers(len(psis)))
        psi, rate = psis[j], rates[j]
        alpha = experiments.random_alpha(8, int(rng.integers(2 ** 31)), 96)
        t = float(np.exp(rng.uniform(math.log(max(2.0, psi.t_start)), math.log(1e4))))
        s = float(dani.s_of_t(psi, t))
        d = flow.trajectory_delta(alpha, EUC, DELTA2, [s])[0].delta
        r = float(rate(s))
        if abs(d - r) < 1e-9:
            banded += 1
            continue
        inside += d >= r
        bad += flow.direct_check(alpha, t, psi, EUC, DELTA2) != (d < r)
    dt = time.perf_counter() - t0
    ok = bad == 0 and 0 < inside < 1000 - banded and dt < 60
    acceptance(8, ok, f"{bad} disagreements in 1000 pairs ({inside} in the target, "
                      f"{banded} inside the 1e-9 band, {dt:.1f}s)")
    assert ok


# 9 ----------------------------------------------------------------------------

@pytest.mark.slow
def test_acceptance_09_zero_one_trend(acceptance):
    t0 = time.perf_counter()
    workers = max(1, min(8, os.cpu_count() or 1))
    div = experiments.zero_one_experiment(dani.loggap(1), 1000, (10, 20, 40), seed=7, workers=workers)
    conv = experiments.zero_one_experiment(dani.loggap(3), 1000, (10, 20, 40), seed=7, workers=workers)
    dt = time.perf_counter() - t0
    margins = [(p1 - p3) / math.sqrt(e1 ** 2 + e3 ** 2) if e1 or e3 else math.inf
               for p1, p3, e1, e3 in zip(div.hit_fraction, conv.hit_fraction,
                                         div.standard_errors(), conv.standard_errors())]
    separated = all(m >= 3 for m in margins)
    monotone = all(a >= b for a, b in zip(conv.hit_fraction, conv.hit_fraction[1:]))
    ok = separated and monotone and dt < 600
    acceptance(9, ok, f"k=1 {[round(p, 3) for p in div.hit_fraction]}, k=3 {[round(p, 3) for p in conv.hit_fraction]}, "
                      f"min separation {min(margins):.1f} SE ({dt:.0f}s)")
    assert ok


# 10 ---------------------------------------------------------------------------

@pytest.mark.slow
def test_acceptance_10_counterexample(acceptance):
    t0 = time.perf_counter()
    cert = experiments.construct_counterexample(dani.scaled(0.98), 10)
    s = [st.s_k for st in cert.stages]
    fresh = flow.trajectory_delta(cert.alpha, EUC, DELTA2, s)
    passed = sum(fp.delta >= st.r_required for fp, st in zip(fresh, cert.stages))
    problems = experiments.verify_certificate(cert)
    dt = time.perf_counter() - t0
    ok = cert.depth == 10 and len(cert.stages) == 10 and passed == 10 and not problems and dt < 300
    acceptance(10, ok, f"{passed}/10 stages re-verified, s_k up to {max(s):.2f}, "
                       f"{len(problems)} certificate problems ({dt:.1f}s)")
    assert ok


# 11 ---------------------------------------------------------------------------

def _random_gamma(rng):
    while True:
        c, d = (int(v) for v in rng.integers(-200, 201, 2))
        if c != 0 and math.gcd(c, d) == 1:
            break
    a = pow(d, -1, abs(c))
    b = (a * d - 1) // c
    k = int(rng.integers(-20, 21))
    return (a + k * c, b + k * d), (c, d)


def test_acceptance_11_rational_orbit(acceptance):
    from fractions import Fraction
    rng = np.random.default_rng(11)
    worst, exact = 0.0, True
    for _ in range(100):
        g = _random_gamma(rng)
        re, _ = H.orbit_point_exact(g)
        exact &= isinstance(re, Fraction) and re == H.real_part_formula(g)
        w = H.mobius(np.array(g, dtype=float), H.Z0.z)
        worst = max(worst, abs(float(re) - w.x))
    ok = exact and worst <= 1e-10
    acceptance(11, ok, f"exact rational for all 100; max |exact - float| = {worst:.1e}")
    assert ok
