"""Monte-Carlo zero-one experiments, the explicit counterexample construction, series tables."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import dani, flow, norms
from .hyperbolic import SQRT3_2, real_part_formula

EUCLIDEAN = norms.euclidean()
DELTA2 = SQRT3_2
C0 = 1.8


# ---------------------------------------------------------------- zero-one law

def random_alpha(seed: int, index: int, bits: int) -> Fraction:
    """Uniform dyadic alpha in [0, 1) with the given number of bits, from stream (seed, index)."""
    rng = np.random.default_rng([seed, index])
    words = rng.integers(0, 2 ** 32, size=(bits + 31) // 32, dtype=np.uint64)
    num = 0
    for w in words:
        num = (num << 32) | int(w)
    num >>= 32 * len(words) - bits
    return Fraction(num, 1 << bits)


def bits_for_horizon(S: float) -> int:
    """Bits of alpha needed to follow the trajectory faithfully up to s = S."""
    return int(math.ceil((2 * S + 40) / math.log(2)))


@dataclass(frozen=True)
class ZeroOneReport:
    psi: dani.PsiSpec
    n_samples: int
    windows: tuple          # ((S, 2S), ...)
    hit_fraction: tuple
    classification: str
    seed: int
    hit_counts: tuple = ()
    grid_step: float = 0.01
    below_one: bool = True  # t psi(t) < 1 on the sampled domain

    def standard_errors(self) -> tuple:
        n = self.n_samples
        return tuple(math.sqrt(p * (1 - p) / n) for p in self.hit_fraction)

    def to_dict(self) -> dict:
        return {"psi": self.psi.to_dict(), "psi_id": self.psi.ident(), "n_samples": self.n_samples,
                "windows": [list(w) for w in self.windows], "hit_fraction": list(self.hit_fraction),
                "hit_counts": list(self.hit_counts), "classification": self.classification,
                "seed": self.seed, "grid_step": self.grid_step, "below_one": self.below_one}

    @classmethod
    def from_dict(cls, d: dict) -> "ZeroOneReport":
        return cls(dani.PsiSpec.from_dict(d["psi"]), int(d["n_samples"]),
                   tuple(tuple(float(x) for x in w) for w in d["windows"]),
                   tuple(float(x) for x in d["hit_fraction"]), d["classification"], int(d["seed"]),
                   tuple(int(x) for x in d.get("hit_counts", ())), float(d.get("grid_step", 0.01)),
                   bool(d.get("below_one", True)))

    def csv_rows(self) -> list[list]:
        return [[lo, hi, f, self.n_samples, self.psi.ident(), self.classification]
                for (lo, hi), f in zip(self.windows, self.hit_fraction)]


CSV_HEADER = ["window_lo", "window_hi", "hit_fraction", "n", "psi_id", "classification"]


def _sample_hits(args):
    psi, seed, lo, hi, windows, bits, grid_step = args
    rate = dani.dani_transform(psi)
    out = []
    for i in range(lo, hi):
        alpha = random_alpha(seed, i, bits)
        hits = flow.dirichlet_hits(alpha, psi, EUCLIDEAN, DELTA2, (windows[0][0], windows[-1][1]),
                                   grid_step=grid_step, rate=rate)
        out.append(tuple(any(h.s_hi >= a and h.s_lo <= b for h in hits) for a, b in windows))
    return out


def zero_one_experiment(psi: dani.PsiSpec, n_samples: int, windows=(10, 20, 40), seed: int = 0,
                        grid_step: float = 0.01, workers: int = 1) -> ZeroOneReport:
    """Fraction of random alpha whose trajectory hits the shrinking target in each window [S, 2S]."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    if (psi.m, psi.n) != (1, 1):
        raise ValueError("zero-one experiments are for m = n = 1")
    ws = sorted(float(S) for S in windows)
    if not ws or ws[0] <= 0:
        raise ValueError("windows must be positive")
    dani.validate(psi, monotone_product=True)
    rate = dani.dani_transform(psi)
    if ws[0] < rate.s_start:
        raise ValueError(f"windows must start after s_start = {rate.s_start:.6g}")
    t_probe = np.geomspace(psi.t_start, min(psi.t_end, psi.t_start * 1e8), 1000)
    below_one = bool(np.all(t_probe * dani.psi_eval(psi, t_probe) < 1))
    wins = tuple((S, 2 * S) for S in ws)
    bits = bits_for_horizon(wins[-1][1])
    chunk = max(1, math.ceil(n_samples / max(1, workers)))
    jobs = [(psi, seed, lo, min(n_samples, lo + chunk), wins, bits, grid_step)
            for lo in range(0, n_samples, chunk)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_sample_hits, jobs))
    else:
        parts = [_sample_hits(j) for j in jobs]
    flags = np.array([f for part in parts for f in part], dtype=bool).reshape(n_samples, len(wins))
    counts = tuple(int(c) for c in flags.sum(axis=0))
    return ZeroOneReport(psi, n_samples, wins, tuple(c / n_samples for c in counts),
                         dani.classify_series(psi), seed, counts, grid_step, below_one)


# ---------------------------------------------------------------- counterexample

@dataclass(frozen=True)
class Stage:
    gamma: tuple            # ((a, b), (c, d))
    s_k: float
    interval: tuple         # (lo, hi) as Fractions, for alpha
    achieved_delta: float
    r_required: float

    def to_dict(self) -> dict:
        return {"gamma": [list(r) for r in self.gamma], "s_k": self.s_k,
                "interval": [str(self.interval[0]), str(self.interval[1])],
                "interval_float": [float(self.interval[0]), float(self.interval[1])],
                "achieved_delta": self.achieved_delta, "r_required": self.r_required}

    @classmethod
    def from_dict(cls, d: dict) -> "Stage":
        return cls(tuple(tuple(int(v) for v in r) for r in d["gamma"]), float(d["s_k"]),
                   (Fraction(d["interval"][0]), Fraction(d["interval"][1])),
                   float(d["achieved_delta"]), float(d["r_required"]))


@dataclass(frozen=True)
class CounterexampleCertificate:
    alpha: Fraction
    depth: int
    stages: tuple
    psi: dani.PsiSpec | None = None
    seed_interval: tuple = (Fraction(0), Fraction(1))

    def to_dict(self) -> dict:
        return {"alpha": str(self.alpha), "alpha_float": float(self.alpha), "depth": self.depth,
                "psi": self.psi.to_dict() if self.psi else None,
                "seed_interval": [str(x) for x in self.seed_interval],
                "stages": [s.to_dict() for s in self.stages]}

    @classmethod
    def from_dict(cls, d: dict) -> "CounterexampleCertificate":
        return cls(Fraction(d["alpha"]), int(d["depth"]),
                   tuple(Stage.from_dict(s) for s in d["stages"]),
                   dani.PsiSpec.from_dict(d["psi"]) if d.get("psi") else None,
                   tuple(Fraction(x) for x in d.get("seed_interval", ("0", "1"))))


class ConstructionExhausted(RuntimeError):
    """No nested candidate was found; carries the partial certificate."""

    def __init__(self, message: str, partial: CounterexampleCertificate):
        super().__init__(message)
        self.partial = partial


_G_MAX = 1 / math.sqrt(3)


def _v_of_g_outer(G: float) -> float:
    if G <= 0:
        return math.inf
    G = min(G, _G_MAX)
    return (1 + math.sqrt(max(0.0, 1 - 3 * G * G))) / (2 * G)


def _v_of_g_inner(G: float) -> float:
    G = max(-_G_MAX, min(G, _G_MAX))
    return 1.5 * G / (1 + math.sqrt(max(0.0, 1 - 3 * G * G)))


def _v_intervals(G1: float, G2: float):
    """Intervals of v with G1 <= v/(v^2 + 3/4) <= G2."""
    out = []
    lo, hi = max(G1, 0.0), min(G2, _G_MAX)
    if lo <= hi and hi > 0:
        out.append((_v_of_g_outer(hi), _v_of_g_outer(lo)))
    lo, hi = max(-G2, 0.0), min(-G1, _G_MAX)
    if lo <= hi and hi > 0:
        out.append((-_v_of_g_outer(lo), -_v_of_g_outer(hi)))
    lo, hi = max(G1, -_G_MAX), min(G2, _G_MAX)
    if lo <= hi:
        out.append((_v_of_g_inner(lo), _v_of_g_inner(hi)))
    return out


class _StageSearch:
    """Finds gamma with Re(gamma z0) deep inside (JL, JR) and Im(gamma z0) < y_prev."""

    def __init__(self, JL: Fraction, JR: Fraction, y_prev: float, rate: dani.RateFunction, c0: float):
        self.JL, self.JR, self.y_prev, self.rate, self.c0 = JL, JR, y_prev, rate, c0
        self.best = None

    def _try(self, a: int, b: int, c: int, d: int):
        N = c * c - c * d + d * d
        h = SQRT3_2 / N
        if not h < self.y_prev or (self.best and h <= self.best[3]):
            return False
        s = -0.5 * math.log(h)
        if s < self.rate.s_start:
            return False
        r = float(self.rate(s))
        eps = 1.0 - r
        if eps <= 0:
            return False
        x = real_part_formula(((a, b), (c, d)))
        w = Fraction(0.5 * self.c0 * eps * h) * Fraction(999999, 1000000)
        if self.JL < x - w and x + w < self.JR:
            self.best = (((a, b), (c, d)), x, w, h, s, r)
            return True
        return False

    def integer_translates(self):
        # gamma = [[1, b], [0, 1]]: Re = b - 1/2, Im = sqrt(3)/2
        X = (self.JL + self.JR) / 2
        b0 = math.floor(X + Fraction(1, 2))
        for b in (b0 - 1, b0, b0 + 1):
            self._try(1, b, 0, 1)

    def fraction(self, a: int, c: int):
        """Points gamma z0 on the circle tangent to the real line at a/c."""
        d0 = pow(a, -1, c) if c > 1 else 0
        v0 = d0 / c - 0.5
        G1 = float(c * (a - c * self.JR))
        G2 = float(c * (a - c * self.JL))
        if G1 > _G_MAX or G2 < -_G_MAX:
            return
        vmin2 = SQRT3_2 / (c * c * self.y_prev) - 0.75
        vmin = math.sqrt(vmin2) if vmin2 > 0 else 0.0
        for lo, hi in _v_intervals(G1, G2):
            for seg in ((max(lo, vmin), hi), (lo, min(hi, -vmin))):
                slo, shi = seg
                if slo > shi:
                    continue
                if slo >= 0:
                    js = range(math.ceil(slo - v0) - 1, math.ceil(slo - v0) + 3)
                elif shi <= 0:
                    js = range(math.floor(shi - v0) + 1, math.floor(shi - v0) - 3, -1)
                else:
                    continue
                for j in js:
                    if not math.isfinite(v0 + j):
                        break
                    d = d0 + j * c
                    num = a * d - 1
                    if num % c:
                        continue
                    if self._try(a, num // c, c, d):
                        break

    def run(self, max_nodes: int):
        """Stern-Brocot descent toward the interval midpoint, testing each fraction."""
        if self.y_prev > SQRT3_2:
            self.integer_translates()
        X = (self.JL + self.JR) / 2
        fl = math.floor(X)
        lo_n, lo_d, hi_n, hi_d = fl, 1, fl + 1, 1
        self.fraction(lo_n, 1)
        self.fraction(hi_n, 1)
        for _ in range(max_nodes):
            n, c = lo_n + hi_n, lo_d + hi_d
            if self.best is not None and 2 / (math.sqrt(3) * c * c) < self.best[3]:
                break   # no point on a circle this small can beat the current best
            self.fraction(n, c)
            m = Fraction(n, c)
            if m == X:
                break
            if X < m:
                hi_n, hi_d = n, c
            else:
                lo_n, lo_d = n, c
        return self.best


def construct_counterexample(psi: dani.PsiSpec, depth: int, c0: float = C0,
                             seed_interval=(0, 1), max_nodes: int = 2_000_000) -> CounterexampleCertificate:
    """An alpha whose trajectory enters K(r(s_k)) at times s_k -> oo (first `depth` stages).

    Each stage picks gamma with Im(gamma z0) = e^(-2 s_k) below the previous
    one and confines alpha to an interval of half-width 0.5 c0 eps_k Im(gamma z0)
    around -Re(gamma z0); then -alpha + i e^(-2 s_k) lies within c0 eps_k of
    gamma z0, inside the region where delta >= 1 - eps_k = r(s_k).
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if (psi.m, psi.n) != (1, 1):
        raise ValueError("the construction is for m = n = 1")
    rate = dani.dani_transform(psi)
    tail = rate(rate.s_start + np.linspace(30.0, 60.0, 31))
    if np.max(tail) >= 1 - 1e-12:
        raise ValueError("psi(t) < 1/t fails for large t (r(s) is not eventually below 1); "
                         "no counterexample exists for such psi")
    lo, hi = (Fraction(seed_interval[0]), Fraction(seed_interval[1]))
    if not lo < hi:
        raise ValueError("seed interval must be non-empty")
    seed = (lo, hi)
    y_prev = math.exp(-2 * rate.s_start) if rate.s_start > 0 else math.inf
    raw = []
    for k in range(depth):
        found = _StageSearch(-hi, -lo, y_prev, rate, c0).run(max_nodes)
        if found is None:
            partial = _certify(psi, raw, seed, lo, hi)
            raise ConstructionExhausted(f"no nested candidate at stage {k + 1}", partial)
        gamma, x, w, h, s, r = found
        lo, hi = -x - w, -x + w
        raw.append((gamma, s, (lo, hi), r))
        y_prev = h
    return _certify(psi, raw, seed, lo, hi)


def _certify(psi, raw, seed, lo, hi) -> CounterexampleCertificate:
    alpha = (lo + hi) / 2
    stages = []
    if raw:
        pts = flow.trajectory_delta(alpha, EUCLIDEAN, DELTA2, [s for _, s, _, _ in raw])
        for (gamma, s, iv, r), fp in zip(raw, pts):
            if fp.delta < r:
                raise RuntimeError(f"stage at s = {s} failed verification ({fp.delta} < {r})")
            stages.append(Stage(gamma, s, iv, fp.delta, r))
    return CounterexampleCertificate(alpha, len(stages), tuple(stages), psi, seed)


def verify_certificate(cert: CounterexampleCertificate, tol: float = 1e-6) -> list[str]:
    """Independent re-check; returns a list of problems (empty when valid)."""
    problems = []
    prev = cert.seed_interval
    for i, st in enumerate(cert.stages):
        (a, b), (c, d) = st.gamma
        if a * d - b * c != 1:
            problems.append(f"stage {i + 1}: gamma not in SL(2, Z)")
        lo, hi = st.interval
        if not (prev[0] < lo < hi < prev[1]):
            problems.append(f"stage {i + 1}: interval not strictly nested")
        if not lo <= cert.alpha <= hi:
            problems.append(f"stage {i + 1}: alpha outside interval")
        prev = st.interval
        grid = np.array([st.s_k])
        dl = flow.trajectory_delta(cert.alpha, EUCLIDEAN, DELTA2, grid)[0].delta
        if abs(dl - st.achieved_delta) > tol:
            problems.append(f"stage {i + 1}: delta {dl} differs from recorded {st.achieved_delta}")
        if dl < st.r_required:
            problems.append(f"stage {i + 1}: delta {dl} below r = {st.r_required}")
    for i in range(1, len(cert.stages)):
        if not cert.stages[i].s_k > cert.stages[i - 1].s_k:
            problems.append(f"stage {i + 1}: s_k not increasing")
    return problems


# ---------------------------------------------------------------- series table

def condition_table(psi_list, K_list) -> list[dict]:
    """Both partial sums for every (psi, K)."""
    rows = []
    for psi in psi_list:
        for K in K_list:
            e, s = dani.series_partial_sums(psi, int(K))
            rows.append({"psi_id": psi.ident(), "K": int(K), "euclidean_sum": e, "supnorm_sum": s,
                         "classification": dani.classify_series(psi)})
    return rows
