"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from normdirichlet import _pykernels
from normdirichlet.flow import ConvergentFrame

try:
    from normdirichlet import _ckernels
except ImportError:
    _ckernels = None


def _lagrange_inputs(n, rng):
    # skewed unimodular bases a_s u_alpha
    s = rng.uniform(0, 20, n)
    a = rng.uniform(0, 1, n)
    e, ie = np.exp(s), np.exp(-s)
    return list(zip(e, np.zeros(n), e * a, ie))


def bench(repeat: int):
    rng = np.random.default_rng(0)
    bases = _lagrange_inputs(20000, rng)
    frame = ConvergentFrame((1 + 5 ** 0.5) / 2, 40.0)
    s_grid = np.linspace(0, 40, 20000)
    cases = {
        "lagrange_reduce x20000": lambda k: [k.lagrange_reduce(*b) for b in bases],
        "envelope_min_sq 20000 s": lambda k: k.envelope_min_sq(frame.eps, frame.qf, s_grid),
    }
    backends = [("python", _pykernels)] + ([("cython", _ckernels)] if _ckernels else [])
    print(f"{'kernel':28s}" + "".join(f"{name:>12s}" for name, _ in backends) + "     speedup")
    for label, fn in cases.items():
        times = [min(timeit.repeat(lambda: fn(k), number=1, repeat=repeat)) for _, k in backends]
        ratio = f"{times[0] / times[1]:10.1f}x" if len(times) > 1 else "      n/a"
        print(f"{label:28s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + ratio)
    if _ckernels is not None:
        a = _pykernels.envelope_min_sq(frame.eps, frame.qf, s_grid)
        b = _ckernels.envelope_min_sq(frame.eps, frame.qf, s_grid)
        print("max |python - cython| envelope:", float(np.max(np.abs(a[0] - b[0]))))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    bench(ap.parse_args().repeat)
