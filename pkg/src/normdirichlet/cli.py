"""Command-line interface: `normdirichlet <subcommand> ...`.

Exit codes: 0 success, 2 invalid input, 3 numeric failure.  Data goes to
stdout (or --output), diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import mpmath
import numpy as np

from . import critical, dani, experiments, flow, hyperbolic, lattice, norms

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3
DIGITS = 12
_PREC = 400   # bits for named constants; enough for s up to about 130


class InputError(ValueError):
    pass


def _g(x) -> str:
    return format(float(x), f".{DIGITS}g")


def _named_alpha(name: str):
    with mpmath.workprec(_PREC):
        table = {"golden": lambda: (1 + mpmath.sqrt(5)) / 2, "sqrt2": lambda: mpmath.sqrt(2),
                 "sqrt3": lambda: mpmath.sqrt(3), "e": lambda: mpmath.e, "pi": lambda: mpmath.pi}
        if name in table:
            return flow.to_fraction(+table[name]())
    return None


def parse_alpha(text: str):
    v = _named_alpha(text.strip().lower())
    if v is not None:
        return v
    try:
        return flow.to_fraction(text)
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc


def parse_floats(text: str, count: int | None = None) -> list[float]:
    try:
        vals = [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"cannot read numbers from {text!r}") from exc
    if count is not None and len(vals) != count:
        raise InputError(f"expected {count} numbers, got {len(vals)} in {text!r}")
    if not all(math.isfinite(v) for v in vals):
        raise InputError("numbers must be finite")
    return vals


def parse_basis(text: str) -> lattice.Lattice:
    """'a,b;c,d' (rows) or a row-major JSON array (inline or path)."""
    t = text.strip()
    if t.startswith("[") or t.endswith(".json"):
        try:
            return lattice.Lattice.from_json(t)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read lattice: {exc}") from exc
    rows = [parse_floats(r) for r in t.split(";") if r.strip()]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise InputError("basis must be square, rows separated by ';'")
    return lattice.Lattice(np.array(rows))


def _norm(text: str) -> norms.NormDescriptor:
    try:
        return norms.from_json(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read norm: {exc}") from exc


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
        if not v > 0 or (isinstance(v, float) and not math.isfinite(v)):
            raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
        return v
    return conv


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return v


# ---------------------------------------------------------------- subcommands

def cmd_critical(a):
    nu = _norm(a.norm)
    data = critical.critical_determinant(nu)
    out = {"delta": data.delta, "method": data.method, "data": data.to_dict()}
    if a.locus:
        out["locus"] = [{"t0": e.t0, "det": e.config.det_pq, "basis": e.basis.tolist(),
                         "is_critical": e.is_critical}
                        for e in critical.trace_critical_locus(nu, a.locus, data)]
    rows = [["delta", "method"], [_g(data.delta), data.method]]
    return out, rows


def cmd_delta(a):
    nu = _norm(a.norm)
    lat = parse_basis(a.basis)
    cv = critical.critical_value(nu)
    sv = lattice.shortest_vector(lat, nu)
    d = lattice.delta(lat, nu, cv)
    out = {"delta": d, "critical_value": cv, "shortest": sv.to_dict()}
    if a.r is not None:
        out["in_target"] = lattice.in_target(lat, nu, cv, a.r)
    rows = [["delta", "length", "v1", "v2"], [_g(d), _g(sv.length)] + [_g(v) for v in sv.vector[:2]]]
    return out, rows


def cmd_check(a):
    nu = _norm(a.norm)
    psi = dani.parse_psi(a.psi)
    alpha = parse_alpha(a.alpha)
    cv = critical.critical_value(nu)
    rate = dani.dani_transform(psi)
    s0 = rate.s_start if a.s_start is None else a.s_start
    hits = flow.dirichlet_hits(alpha, psi, nu, cv, (s0, a.S), grid_step=a.grid_step, rate=rate)
    s_star = s0 if a.s_star is None else a.s_star
    out = flow.check_report(hits, a.S, s_star)
    out["alpha"] = str(alpha)
    out["psi"] = psi.to_dict()
    if a.direct is not None:
        out["direct"] = flow.direct_check(alpha, a.direct, psi, nu, cv)
    rows = [["s_lo", "s_hi", "delta_max"]] + [[_g(h.s_lo), _g(h.s_hi), _g(h.delta_max)] for h in hits]
    return out, rows


def cmd_reduce(a):
    x, y = parse_floats(a.z, 2)
    if not y > 0:
        raise InputError("the point must lie in the upper half-plane (y > 0)")
    res = hyperbolic.reduce(complex(x, y))
    out = res.to_dict()
    out["word_str"] = res.word_str()
    return out, [[_g(res.z_reduced.x), _g(res.z_reduced.y)], [res.word_str()]]


def cmd_locate(a):
    lat = parse_basis(a.basis)
    if not lat.is_unimodular():
        raise InputError("locate needs a unimodular planar lattice")
    res = hyperbolic.point_of_lattice(lat)
    dist = hyperbolic.distance_to_critical(lat)
    out = res.to_dict()
    out["distance_to_critical"] = dist
    out["delta"] = lattice.delta(lat, norms.euclidean(), hyperbolic.EUCLIDEAN_CRITICAL)
    rows = [["x", "y", "distance_to_critical", "delta"],
            [_g(res.z_reduced.x), _g(res.z_reduced.y), _g(dist), _g(out["delta"])]]
    return out, rows


def cmd_dani(a):
    psi = dani.parse_psi(a.psi, a.m, a.n)
    rate = dani.dani_transform(psi)
    lo, hi, n = a.s_range if a.s_range else (rate.s_start, rate.s_start + 20.0, 101)
    n = int(n)
    if n < 1 or hi < lo:
        raise InputError("s range must be lo,hi,n with lo <= hi and n >= 1")
    s = np.linspace(lo, hi, n)
    t = np.atleast_1d(rate.time(s))
    r = np.atleast_1d(rate(s))
    out = {"psi": psi.to_dict(), "s_start": rate.s_start, "s": s.tolist(), "t": t.tolist(), "r": r.tolist()}
    rows = [["s", "t", "r"]] + [[_g(x), _g(y), _g(z)] for x, y, z in zip(s, t, r)]
    return out, rows


def cmd_zeroone(a):
    psi = dani.parse_psi(a.psi)
    windows = parse_floats(a.windows)
    rep = experiments.zero_one_experiment(psi, a.samples, windows, seed=a.seed,
                                          grid_step=a.grid_step, workers=a.workers)
    out = rep.to_dict()
    out["standard_errors"] = list(rep.standard_errors())
    rows = [experiments.CSV_HEADER] + [[_g(lo), _g(hi), _g(f), n, pid, cl]
                                       for lo, hi, f, n, pid, cl in rep.csv_rows()]
    return out, rows


def cmd_counterexample(a):
    psi = dani.parse_psi(a.psi)
    cert = experiments.construct_counterexample(psi, a.depth, c0=a.c0)
    rows = [["stage", "s_k", "achieved_delta", "r_required", "interval_lo", "interval_hi"]]
    rows += [[i + 1, _g(s.s_k), _g(s.achieved_delta), _g(s.r_required),
              _g(s.interval[0]), _g(s.interval[1])] for i, s in enumerate(cert.stages)]
    return cert.to_dict(), rows


def cmd_table(a):
    psis = [dani.parse_psi(p) for p in a.psi]
    Ks = [int(k) for k in parse_floats(a.K)]
    if any(k < 1 for k in Ks):
        raise InputError("K values must be positive")
    table = experiments.condition_table(psis, Ks)
    rows = [["psi_id", "K", "euclidean_sum", "supnorm_sum", "classification"]]
    rows += [[r["psi_id"], r["K"], _g(r["euclidean_sum"]), _g(r["supnorm_sum"]), r["classification"]]
             for r in table]
    return {"rows": table}, rows


# ---------------------------------------------------------------- parser

_DEFAULT_NORM = '{"kind": "euclidean"}'


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = argparse.ArgumentParser(prog="normdirichlet", formatter_class=fmt,
                                description="Norm-generalized Dirichlet improvability toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_, fmt_default="json"):
        sp = sub.add_parser(name, help=help_, description=help_, formatter_class=fmt)
        sp.set_defaults(func=func)
        sp.add_argument("--output", "-o", default="-", help="output path ('-' for stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default=fmt_default, help="output format")
        return sp

    sp = add("critical", cmd_critical, "critical determinant of a planar norm")
    sp.add_argument("--norm", default=_DEFAULT_NORM, help="norm descriptor (JSON text or path)")
    sp.add_argument("--locus", type=_nonneg_int, default=0, help="also trace N hexagon configurations")

    sp = add("delta", cmd_delta, "normalized shortest vector delta of a lattice")
    sp.add_argument("--basis", required=True, help="rows 'a,b;c,d' or lattice JSON")
    sp.add_argument("--norm", default=_DEFAULT_NORM, help="norm descriptor (JSON text or path)")
    sp.add_argument("--r", type=_positive(float), default=None, help="also test membership in K(r)")

    sp = add("check", cmd_check, "Dirichlet hits of the trajectory of alpha up to time S")
    sp.add_argument("--alpha", required=True, help="rational/decimal, or golden, sqrt2, sqrt3, e, pi")
    sp.add_argument("--psi", required=True, help="e.g. scaled:c=0.9, loggap:k=1, table:path.csv")
    sp.add_argument("--S", type=_positive(float), required=True, help="final flow time")
    sp.add_argument("--s-start", type=float, default=None, help="first flow time (default: domain start)")
    sp.add_argument("--s-star", type=float, default=None, help="report whether no hits occur after this time")
    sp.add_argument("--norm", default=_DEFAULT_NORM, help="norm descriptor (JSON text or path)")
    sp.add_argument("--grid-step", type=_positive(float), default=0.01, help="initial scan step in s")
    sp.add_argument("--direct", type=_positive(float), default=None, help="also run the integer search at this t")

    sp = add("reduce", cmd_reduce, "reduce a point of the upper half-plane to the fundamental domain", "csv")
    sp.add_argument("--z", required=True, help="point 'x,y' with y > 0")

    sp = add("locate", cmd_locate, "point of the modular surface of a unimodular lattice")
    sp.add_argument("--basis", required=True, help="rows 'a,b;c,d' or lattice JSON")

    sp = add("dani", cmd_dani, "target radius r(s) and time t(s) for psi", "csv")
    sp.add_argument("--psi", required=True, help="e.g. scaled:c=0.9, powergap:k=2, table:path.csv")
    sp.add_argument("--m", type=_positive(int), default=1, help="number of linear forms")
    sp.add_argument("--n", type=_positive(int), default=1, help="number of variables")
    sp.add_argument("--s-range", type=lambda t: parse_floats(t, 3), default=None,
                    help="lo,hi,count (default: s_start, s_start + 20, 101)")

    sp = add("zeroone", cmd_zeroone, "Monte-Carlo hit fractions in windows [S, 2S]", "csv")
    sp.add_argument("--psi", required=True, help="e.g. loggap:k=1")
    sp.add_argument("--samples", "-N", type=_positive(int), default=1000, help="number of random alpha")
    sp.add_argument("--windows", default="10,20,40", help="window starts S")
    sp.add_argument("--seed", type=int, required=True, help="random seed (required)")
    sp.add_argument("--grid-step", type=_positive(float), default=0.01, help="initial scan step in s")
    sp.add_argument("--workers", type=_positive(int), default=1, help="worker processes")

    sp = add("counterexample", cmd_counterexample, "build an alpha hitting K(r(s_k)) at growing s_k")
    sp.add_argument("--psi", required=True, help="e.g. scaled:c=0.98")
    sp.add_argument("--depth", type=_nonneg_int, default=10, help="number of stages")
    sp.add_argument("--c0", type=_positive(float), default=experiments.C0,
                    help="inner sandwich constant used for interval widths")

    sp = add("table", cmd_table, "partial sums of the Euclidean and sup-norm series", "csv")
    sp.add_argument("--psi", action="append", required=True, help="psi descriptor (repeatable)")
    sp.add_argument("--K", default="1000,1000000", help="comma-separated truncation points")
    return p


def _emit(args, out, rows):
    if args.format == "json":
        text = json.dumps(out, indent=2, default=str) + "\n"
    else:
        buf = io.StringIO()
        csv.writer(buf, lineterminator="\n").writerows(rows)
        text = buf.getvalue()
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        out, rows = args.func(args)
        _emit(args, out, rows)
    except (RuntimeError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
