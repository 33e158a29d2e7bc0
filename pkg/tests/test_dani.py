import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normdirichlet import dani


def test_psi_examples():
    assert dani.psi_eval(dani.scaled(1), 10) == pytest.approx(0.1, rel=1e-15)
    assert dani.psi_eval(dani.powergap(1), 10) == pytest.approx(0.09, rel=1e-14)
    assert dani.psi_eval(dani.loggap(1), math.e ** 2) == pytest.approx(math.exp(-2) / 2, rel=1e-14)
    assert dani.psi_eval(dani.loggap(1), math.e ** 2) == pytest.approx(0.067668, abs=1e-6)


def test_scaled_rate_is_constant():
    for c in (0.3, 0.81, 1.0, 1.7):
        rate = dani.dani_transform(dani.scaled(c))
        s = np.linspace(rate.s_start, 50, 100)
        assert np.max(np.abs(rate(s) - math.sqrt(c))) < 1e-9


@pytest.mark.parametrize("m,n", [(1, 2), (2, 1), (2, 2), (1, 3)])
def test_scaled_rate_general_mn(m, n):
    c = 0.6
    rate = dani.dani_transform(dani.scaled(c, m, n))
    s = np.linspace(rate.s_start, 30, 50)
    assert np.max(np.abs(rate(s) - c ** (m / (m + n)))) < 1e-9


def test_inverse_square_table():
    ts = np.geomspace(1, 1e12, 200)
    rate = dani.dani_transform(dani.tabulated(ts, ts ** -2.0))
    s = np.linspace(rate.s_start, 1.5 * math.log(1e12) - 1, 100)
    assert np.max(np.abs(rate(s) - np.exp(-s / 3))) < 1e-9


def test_table_beyond_range():
    ts = np.geomspace(1, 1e6, 20)
    rate = dani.dani_transform(dani.tabulated(ts, ts ** -2.0))
    with pytest.raises(ValueError):
        rate(40.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.05, 1.5), st.floats(0, 60))
def test_scaled_round_trip(c, s):
    psi = dani.scaled(c)
    rate = dani.dani_transform(psi)
    s = max(s, rate.s_start)
    t = rate.time(s)
    assert dani.s_of_t(psi, t) == pytest.approx(s, abs=1e-10)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([dani.loggap(1), dani.loggap(3), dani.powergap(1), dani.powergap(2)]),
       st.floats(0, 40))
def test_round_trip_and_bounds(psi, ds):
    rate = dani.dani_transform(psi)
    s = rate.s_start + ds
    t = rate.time(s)
    assert dani.s_of_t(psi, t) == pytest.approx(s, abs=1e-10)
    r = rate(s)
    prod = t * dani.psi_eval(psi, t)
    assert r == pytest.approx(math.sqrt(prod), rel=1e-12)
    assert r <= 1
    # (1 - t psi)/(1 - sqrt(t psi)) = 1 + sqrt(t psi) lies in [1, 2]
    g = t * dani.gap(psi, t)
    if g > 1e-6:   # 1 - sqrt(t psi) is computed with cancellation below this
        ratio = g / (1 - math.sqrt(prod))
        assert 1 - 1e-9 <= ratio <= 2 + 1e-9


def test_vector_and_scalar_paths_agree():
    for psi in (dani.loggap(1), dani.powergap(2)):
        rate = dani.dani_transform(psi)
        s = np.linspace(rate.s_start, 25, 40)
        assert np.allclose([rate(float(x)) for x in s], rate(s), rtol=1e-13, atol=0)


def test_default_t_start():
    assert dani.loggap(1).t_start == pytest.approx(5.043, abs=1e-3)
    assert dani.loggap(3).t_start == pytest.approx(4.274, abs=1e-3)
    assert dani.powergap(1).t_start == pytest.approx(2.0)
    for psi in (dani.loggap(1), dani.loggap(3), dani.powergap(0.5)):
        dani.validate(psi, monotone_product=True)


def test_validation_errors():
    with pytest.raises(ValueError):
        dani.validate(dani.tabulated([1, 2, 3], [1, 2, 0.1]))   # increasing psi
    with pytest.raises(ValueError):
        dani.psi_eval(dani.loggap(1), 2.0)                      # below the domain
    with pytest.raises(ValueError):
        dani.scaled(-1)
    with pytest.raises(ValueError):
        dani.parse_psi("nonsense")
    with pytest.raises(ValueError):
        dani.validate(dani.tabulated([1, 10, 100], [1, 0.2, 0.001]), monotone_product=True)


def test_parse_psi():
    assert dani.parse_psi("scaled:c=0.9") == dani.scaled(0.9)
    assert dani.parse_psi("loggap:k=2,t0=10") == dani.loggap(2, t_start=10)
    assert dani.parse_psi("powergap:k=1").k == 1


def test_table_file(tmp_path):
    path = tmp_path / "psi.csv"
    ts = np.geomspace(1, 1e4, 9)
    path.write_text("t,psi\n" + "".join(f"{float(t)!r},{0.5 / float(t)!r}\n" for t in ts))
    psi = dani.parse_psi(f"table:{path}")
    assert dani.psi_eval(psi, 300.0) == pytest.approx(0.5 / 300, rel=1e-12)


def test_round_trip_dict():
    for psi in (dani.scaled(0.5, 2, 1), dani.loggap(3), dani.tabulated([1, 10], [1, 0.05], t_start=2)):
        assert dani.PsiSpec.from_dict(psi.to_dict()) == psi


def test_series_examples():
    e1, s1 = dani.series_partial_sums(dani.loggap(1), 10 ** 6)
    assert e1 == pytest.approx(2.091, abs=1e-3) and s1 > e1
    # divergent: grows like log log K
    e2, _ = dani.series_partial_sums(dani.loggap(1), 10 ** 3)
    assert e1 - e2 == pytest.approx(math.log(math.log(1e6)) - math.log(math.log(1e3)), abs=0.01)
    # convergent: Cauchy tails shrink
    a, _ = dani.series_partial_sums(dani.loggap(2), 10 ** 4)
    b, _ = dani.series_partial_sums(dani.loggap(2), 10 ** 5)
    c, _ = dani.series_partial_sums(dani.loggap(2), 10 ** 6)
    assert 0 < c - b < b - a
    # power gap: sum of k^-2 from k0 = 2
    e, s = dani.series_partial_sums(dani.powergap(1), 10 ** 6)
    assert e == pytest.approx(math.pi ** 2 / 6 - 1, abs=1e-5)
    assert s < 10


def test_series_rejects_large_psi():
    with pytest.raises(ValueError):
        dani.series_partial_sums(dani.scaled(1.0), 100)


def test_classification():
    assert dani.classify_series(dani.loggap(1)) == dani.DIVERGENT
    assert dani.classify_series(dani.loggap(3)) == dani.CONVERGENT
    assert dani.classify_series(dani.powergap(0.5)) == dani.CONVERGENT
    assert dani.classify_series(dani.scaled(0.9)) == dani.DIVERGENT
    assert dani.classify_series(dani.tabulated([1, 10], [1, 0.05])) == dani.UNKNOWN
