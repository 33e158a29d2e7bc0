import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from normdirichlet import _kernels, _pykernels
from normdirichlet.flow import ConvergentFrame

ckernels = pytest.importorskip("normdirichlet._ckernels")


@settings(max_examples=300, deadline=None)
@given(st.floats(0, 25), st.floats(0, 1), st.floats(0, 6.3))
def test_lagrange_backends_agree(s, a, theta):
    c, sn = np.cos(theta), np.sin(theta)
    b = np.array([[c, -sn], [sn, c]]) @ np.array([[np.exp(s), np.exp(s) * a], [0, np.exp(-s)]])
    args = (b[0, 0], b[1, 0], b[0, 1], b[1, 1])
    py, cy = _pykernels.lagrange_reduce(*args), ckernels.lagrange_reduce(*args)
    assert py[4:] == cy[4:]                     # same unimodular change of basis
    assert np.allclose(py[:4], cy[:4], rtol=1e-12, atol=1e-300)
    U = np.array([[py[4], py[5]], [py[6], py[7]]])
    # recomputing B @ U in floats loses digits in proportion to |B| |U|
    scale = np.abs(b).max() * np.abs(U).max()
    assert np.allclose(b @ U, np.array([[py[0], py[2]], [py[1], py[3]]]), rtol=0, atol=1e-13 * scale)


def test_envelope_backends_agree():
    frame = ConvergentFrame((1 + 5 ** 0.5) / 2, 30.0)
    s = np.linspace(0, 30, 3001)
    v1, k1 = _pykernels.envelope_min_sq(frame.eps, frame.qf, s)
    v2, k2 = ckernels.envelope_min_sq(frame.eps, frame.qf, s)
    assert np.allclose(v1, v2, rtol=1e-14, atol=0)
    assert np.array_equal(k1, k2) or np.allclose(v1, v2, rtol=1e-15)


def test_backend_selected():
    assert _kernels.BACKEND in ("cython", "python")


def test_fallback_can_be_forced():
    env = dict(os.environ, NORMDIRICHLET_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "from normdirichlet import BACKEND; print(BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_fallback_results_match_compiled():
    code = ("import numpy as np\nfrom normdirichlet import flow, norms\n"
            "p = flow.trajectory_delta(0.123456789, norms.euclidean(), 3 ** 0.5 / 2, np.linspace(0, 15, 40))\n"
            "print(repr([x.delta for x in p]))")
    runs = []
    for flag in ("1", "0"):
        env = dict(os.environ, NORMDIRICHLET_PURE_PYTHON=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        runs.append(np.array(eval(out.stdout)))
    assert np.allclose(runs[0], runs[1], rtol=1e-14, atol=0)
