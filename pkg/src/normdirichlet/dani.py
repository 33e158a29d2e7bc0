"""Approximation functions psi, the change of variables psi -> r(s), and the series tests.

For an m x n system, d = m + n, the function psi is turned into a target
radius along the diagonal flow by

    s = (mn/d) ln(t / psi(t)),      r(s) = t^(n/d) psi(t)^(m/d).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

SCALED = "scaled"
POWERGAP = "powergap"
LOGGAP = "loggap"
TABULATED = "table"
FAMILIES = (SCALED, POWERGAP, LOGGAP, TABULATED)

CONVERGENT = "Convergent"
DIVERGENT = "Divergent"
UNKNOWN = "Unknown"

_INVERT_TOL = 1e-13   # absolute tolerance on ln t


@dataclass(frozen=True)
class PsiSpec:
    """An approximation function on [t_start, oo).

    scaled:   c t^(-n/m)
    powergap: 1/t - 1/t^(k+1)
    loggap:   1/t - 1/(t (log t)^k)
    table:    log-log linear interpolation of (ts, values)
    """

    family: str
    c: float | None = None
    k: float | None = None
    ts: tuple | None = None
    values: tuple | None = None
    t_start: float | None = None
    m: int = 1
    n: int = 1

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown psi family {self.family!r}")
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be positive")
        if self.family == SCALED and not (self.c is not None and self.c > 0):
            raise ValueError("scaled psi needs c > 0")
        if self.family in (POWERGAP, LOGGAP) and not (self.k is not None and self.k > 0):
            raise ValueError(f"{self.family} psi needs k > 0")
        if self.family == TABULATED:
            ts = np.asarray(self.ts, dtype=float)
            vs = np.asarray(self.values, dtype=float)
            if ts.ndim != 1 or ts.shape != vs.shape or ts.size < 2:
                raise ValueError("table psi needs matching ts and values (at least 2)")
            if np.any(np.diff(ts) <= 0) or ts[0] <= 0 or np.any(vs <= 0):
                raise ValueError("table psi needs increasing positive ts and positive values")
        if self.t_start is None:
            object.__setattr__(self, "t_start", default_t_start(self))
        if not self.t_start >= 1.0:
            raise ValueError("t_start must be >= 1")
        if self.family == TABULATED and not self.ts[0] <= self.t_start < self.ts[-1]:
            raise ValueError("t_start outside the table")

    @property
    def d(self) -> int:
        return self.m + self.n

    @property
    def t_end(self) -> float:
        return float(self.ts[-1]) if self.family == TABULATED else math.inf

    def ident(self) -> str:
        """Short identifier in the command-line syntax."""
        if self.family == SCALED:
            core = f"scaled:c={self.c:g}"
        elif self.family in (POWERGAP, LOGGAP):
            core = f"{self.family}:k={self.k:g}"
        else:
            core = f"table:n={len(self.ts)}"
        return core if (self.m, self.n) == (1, 1) else f"{core},m={self.m},n={self.n}"

    def to_dict(self) -> dict:
        d = {"family": self.family, "t_start": self.t_start, "m": self.m, "n": self.n}
        if self.c is not None:
            d["c"] = self.c
        if self.k is not None:
            d["k"] = self.k
        if self.ts is not None:
            d["ts"] = list(self.ts)
            d["values"] = list(self.values)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PsiSpec":
        return cls(d["family"], c=d.get("c"), k=d.get("k"),
                   ts=tuple(d["ts"]) if d.get("ts") is not None else None,
                   values=tuple(d["values"]) if d.get("values") is not None else None,
                   t_start=d.get("t_start"), m=int(d.get("m", 1)), n=int(d.get("n", 1)))


def scaled(c: float, m: int = 1, n: int = 1, t_start: float | None = None) -> PsiSpec:
    return PsiSpec(SCALED, c=float(c), m=m, n=n, t_start=t_start)


def powergap(k: float, t_start: float | None = None) -> PsiSpec:
    return PsiSpec(POWERGAP, k=float(k), t_start=t_start)


def loggap(k: float, t_start: float | None = None) -> PsiSpec:
    return PsiSpec(LOGGAP, k=float(k), t_start=t_start)


def tabulated(ts, values, t_start: float | None = None, m: int = 1, n: int = 1) -> PsiSpec:
    return PsiSpec(TABULATED, ts=tuple(map(float, ts)), values=tuple(map(float, values)),
                   t_start=t_start, m=m, n=n)


def default_t_start(psi: PsiSpec) -> float:
    """First t from which the family is positive and non-increasing."""
    if psi.family == SCALED:
        return 1.0
    if psi.family == POWERGAP:
        return max(1.0, (psi.k + 1.0) ** (1.0 / psi.k))
    if psi.family == LOGGAP:
        k = psi.k
        # psi' <= 0  iff  L^-k (1 + k/L) <= 1 with L = log t
        lstar = brentq(lambda L: L ** -k * (1 + k / L) - 1.0, 1.0, 1e6)
        return math.exp(lstar) * (1 + 1e-12)
    return float(psi.ts[0])


def read_table(path) -> PsiSpec:
    """Read a two-column CSV (t, psi); a header row is skipped."""
    ts, vs = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                t, v = float(row[0]), float(row[1])
            except ValueError:
                continue
            ts.append(t)
            vs.append(v)
    return tabulated(ts, vs)


def parse_psi(text: str, m: int = 1, n: int = 1) -> PsiSpec:
    """Parse 'scaled:c=0.9', 'powergap:k=1', 'loggap:k=2,t0=10', 'table:<csv>'."""
    if ":" not in text:
        raise ValueError(f"psi descriptor {text!r} must look like family:key=value")
    fam, rest = text.split(":", 1)
    fam = fam.strip().lower()
    if fam == TABULATED:
        path, _, opts = rest.partition(",")
        base = read_table(Path(path.strip()))
        kv = _kv(opts)
        return tabulated(base.ts, base.values, t_start=kv.get("t0"), m=m, n=n)
    kv = _kv(rest)
    t0 = kv.pop("t0", None)
    if fam == SCALED:
        return PsiSpec(SCALED, c=_req(kv, "c"), m=m, n=n, t_start=t0)
    if fam in (POWERGAP, LOGGAP):
        if (m, n) != (1, 1):
            raise ValueError(f"{fam} is defined for m = n = 1")
        return PsiSpec(fam, k=_req(kv, "k"), t_start=t0)
    raise ValueError(f"unknown psi family {fam!r}")


def _kv(text: str) -> dict:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        key, sep, val = part.partition("=")
        if not sep:
            raise ValueError(f"expected key=value, got {part!r}")
        out[key.strip()] = float(val)
    return out


def _req(kv: dict, key: str) -> float:
    if key not in kv:
        raise ValueError(f"missing parameter {key}")
    return kv[key]


def _check_domain(psi: PsiSpec, t: np.ndarray):
    if np.any(t < psi.t_start * (1 - 1e-12)):
        raise ValueError(f"t below the domain start {psi.t_start}")
    if psi.family == TABULATED and np.any(t > psi.ts[-1] * (1 + 1e-12)):
        raise ValueError(f"t beyond the last table entry {psi.ts[-1]}")


def psi_eval(psi: PsiSpec, t):
    """psi(t); vectorized."""
    t = np.asarray(t, dtype=float)
    _check_domain(psi, t)
    if psi.family == SCALED:
        out = psi.c * t ** (-psi.n / psi.m)
    elif psi.family == POWERGAP:
        out = 1.0 / t - t ** (-psi.k - 1.0)
    elif psi.family == LOGGAP:
        out = (1.0 - np.log(t) ** (-psi.k)) / t
    else:
        lt = np.log(np.clip(t, psi.ts[0], psi.ts[-1]))
        out = np.exp(np.interp(lt, np.log(psi.ts), np.log(psi.values)))
    return out if out.ndim else float(out)


def gap(psi: PsiSpec, t):
    """1/t - psi(t), computed without cancellation for the analytic families."""
    t = np.asarray(t, dtype=float)
    _check_domain(psi, t)
    if psi.family == POWERGAP:
        out = t ** (-psi.k - 1.0)
    elif psi.family == LOGGAP:
        out = 1.0 / (t * np.log(t) ** psi.k)
    elif psi.family == SCALED and psi.m == psi.n:
        out = (1.0 - psi.c) / t
    else:
        out = 1.0 / t - psi_eval(psi, t)
    return out if out.ndim else float(out)


def validate(psi: PsiSpec, monotone_product: bool = False, t_max: float | None = None, n: int = 1000):
    """Check monotonicity hypotheses on n log-spaced samples; raises ValueError."""
    hi = min(psi.t_end, t_max if t_max is not None else psi.t_start * 1e8)
    t = np.geomspace(psi.t_start, hi, n)
    v = psi_eval(psi, t)
    if np.any(v <= 0):
        raise ValueError("psi must be positive on its domain")
    if np.any(np.diff(v) > 1e-12 * v[:-1]):
        raise ValueError("psi is not non-increasing on its domain")
    ratio = np.log(t) - np.log(v)
    if np.any(np.diff(ratio) <= 0):
        raise ValueError("t/psi(t) is not strictly increasing")
    if monotone_product:
        if (psi.m, psi.n) != (1, 1):
            raise ValueError("the monotone product test is for m = n = 1")
        prod = t * v
        if np.any(np.diff(prod) < -1e-12 * prod[:-1]):
            raise ValueError("t psi(t) is not non-decreasing")


@dataclass(frozen=True)
class RateFunction:
    """r(s) = t^(n/d) psi(t)^(m/d) with t solving s = (mn/d) ln(t/psi(t))."""

    psi: PsiSpec
    s_start: float

    def _s_of_logt(self, u):
        p = self.psi
        return p.m * p.n / p.d * (u - np.log(psi_eval(p, np.exp(u))))

    def _time_scalar(self, s: float, lo: float, hi: float) -> float:
        p = self.psi
        k = p.m * p.n / p.d
        if p.family == POWERGAP:
            def f(u):
                return k * (u - math.log(math.exp(-u) - math.exp(-(p.k + 1) * u))) - s
        elif p.family == LOGGAP:
            def f(u):
                return k * (u - math.log((1.0 - u ** (-p.k)) * math.exp(-u))) - s
        else:
            def f(u):
                return float(self._s_of_logt(u)) - s
        if f(lo) >= 0:
            return math.exp(lo)
        return math.exp(brentq(f, lo, hi, xtol=_INVERT_TOL, rtol=4 * np.finfo(float).eps))

    def time(self, s):
        """Invert s -> t by bisection in ln t (relative tolerance about 1e-13)."""
        p = self.psi
        scalar = np.ndim(s) == 0
        s = np.asarray(s, dtype=float)
        if np.any(s < self.s_start - 1e-12):
            raise ValueError(f"s below s_start = {self.s_start}")
        s = np.maximum(s, self.s_start)
        lo = np.full(s.shape, math.log(p.t_start))
        psi0 = psi_eval(p, p.t_start)
        hi = np.maximum(lo, p.d / (p.m * p.n) * s + math.log(psi0)) + 1.0
        if p.family == TABULATED:
            top = math.log(p.ts[-1])
            if np.any(self._s_of_logt(np.minimum(hi, top)) < s - 1e-12):
                raise ValueError("s beyond the tabulated range")
            hi = np.minimum(hi, top)
        if scalar:
            return self._time_scalar(float(s), float(lo), float(hi))
        for _ in range(200):
            if np.all(hi - lo <= _INVERT_TOL):
                break
            mid = 0.5 * (lo + hi)
            below = self._s_of_logt(mid) < s
            lo = np.where(below, mid, lo)
            hi = np.where(below, hi, mid)
        t = np.exp(0.5 * (lo + hi))
        return t if t.ndim else float(t)

    def __call__(self, s):
        p = self.psi
        s_arr = np.asarray(s, dtype=float)
        if p.family == SCALED:
            if np.any(s_arr < self.s_start - 1e-12):
                raise ValueError(f"s below s_start = {self.s_start}")
            out = np.full(s_arr.shape, p.c ** (p.m / p.d))
        else:
            t = np.asarray(self.time(s_arr))
            out = t ** (p.n / p.d) * np.asarray(psi_eval(p, t)) ** (p.m / p.d)
        return out if out.ndim else float(out)


def s_of_t(psi: PsiSpec, t):
    """Flow time of t: (mn/d) ln(t/psi(t))."""
    t = np.asarray(t, dtype=float)
    out = psi.m * psi.n / psi.d * (np.log(t) - np.log(psi_eval(psi, t)))
    return out if out.ndim else float(out)


def dani_transform(psi: PsiSpec) -> RateFunction:
    """The target-radius function r(s) attached to psi."""
    validate(psi)
    return RateFunction(psi, float(s_of_t(psi, psi.t_start)))


def series_partial_sums(psi: PsiSpec, K: int) -> tuple[float, float]:
    """(sum (1/k - psi(k)), sum -log(1 - k psi(k)) (1/k - psi(k))) over k0 <= k <= K."""
    if (psi.m, psi.n) != (1, 1):
        raise ValueError("series are defined for m = n = 1")
    k0 = max(1, math.ceil(psi.t_start))
    e_sum = s_sum = 0.0
    step = 10 ** 6
    for lo in range(k0, K + 1, step):
        k = np.arange(lo, min(K, lo + step - 1) + 1, dtype=float)
        g = np.asarray(gap(psi, k))
        if np.any(g <= 0):
            bad = int(k[np.argmax(g <= 0)])
            raise ValueError(f"k psi(k) >= 1 at k = {bad}")
        e_sum += float(np.sum(g))
        s_sum += float(np.sum(-np.log(k * g) * g))
    return e_sum, s_sum


def classify_series(psi: PsiSpec) -> str:
    """Convergence of sum (1/k - psi(k)) for the analytic families."""
    if psi.family == POWERGAP:
        return CONVERGENT
    if psi.family == LOGGAP:
        return DIVERGENT if psi.k <= 1 else CONVERGENT
    if psi.family == SCALED and (psi.m, psi.n) == (1, 1):
        if psi.c < 1:
            return DIVERGENT
        if psi.c == 1:
            return CONVERGENT
    return UNKNOWN
