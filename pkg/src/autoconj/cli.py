"""Command-line interface: ``autoconj <subcommand> ...``.

Exit codes: 0 success, 1 verification failure or (with ``--strict``) a
minimizer that did not attain its infimum inside the search box, 2 bad
input (parse errors, non-monotone operators), 3 dimension mismatch.

Numbers are written as shortest round-trip decimals.  ``+inf`` becomes the
string ``"inf"`` in JSON and an empty cell in CSV.
"""

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import verify as verify_mod
from .fitzpatrick import fitz_eval, fitzpatrick_function
from .gallery import (NEGLOG_ITEMS, GSpec, energy_sequence_demo, id_family_eval, in_C,
                      neglog_pair, neglog_values)
from .linop import (DimensionError, LinearMonotoneOperator, MatrixParseError, NotMonotoneError,
                    load_matrix, pairing, parse_matrix)
from .oracle import GridSpec, audit_monotone, extract_graph
from .representers import (a_rep_eval, a_representer, b_rep_eval, c_rep_eval, c_representer,
                           unified_eval, unified_representer)

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_DIM = 0, 1, 2, 3


class UsageError(Exception):
    """Bad command-line value; maps to exit code 2."""


# -- parsing helpers ---------------------------------------------------------

def parse_point(text):
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"bad point {text!r}: expected comma-separated numbers") from None
    if not vals:
        raise UsageError("empty point")
    return np.array(vals)


def parse_box(text):
    try:
        lo, hi = (float(t) for t in text.split(":"))
    except ValueError:
        raise UsageError(f"bad box {text!r}: expected lo:hi") from None
    if not lo < hi:
        raise UsageError(f"bad box {text!r}: need lo < hi")
    return lo, hi


def boxes_for(args, ndim, default):
    """Per-axis ``(lo, hi)``: one ``--box`` applies to every axis, otherwise one per axis.

    ``default`` is a single ``(lo, hi)`` or a per-axis list.
    """
    if not args.box and isinstance(default, list):
        return default
    given = [parse_box(b) for b in (args.box or [])] or [default]
    if len(given) == 1:
        return given * ndim
    if len(given) != ndim:
        raise DimensionError(f"{len(given)} --box values for {ndim} axes")
    return given


def load_operator(args):
    if args.matrix is not None:
        M = parse_matrix(args.matrix.replace(";", "\n"))
    elif args.op is not None:
        try:
            M = load_matrix(args.op)
        except OSError as exc:
            raise UsageError(f"cannot read operator file: {exc}") from None
    else:
        raise UsageError("an operator is required (--op FILE or --matrix ROWS)")
    return LinearMonotoneOperator(M, tol=args.mono_tol)


def split_point(p, n):
    if len(p) != 2 * n:
        raise DimensionError(f"point has {len(p)} coordinates, expected 2n = {2 * n}")
    return p[:n], p[n:]


# -- emission ---------------------------------------------------------------

def _json_value(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "inf" if v == math.inf else v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_value(u) for u in v]
    if isinstance(v, dict):
        return {k: _json_value(u) for k, u in v.items()}
    return v


def _csv_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "" if v == math.inf else repr(float(v))
    if v is None:
        return ""
    return str(v)


def _flatten(record):
    out = {}
    for k, v in record.items():
        if k == "flags":
            out[k] = ";".join(v)
        elif v is None:
            out[k] = None
        elif isinstance(v, (list, tuple, np.ndarray)):
            if len(v) == 1:
                out[k] = v[0]
            else:
                for i, u in enumerate(v, start=1):
                    out[f"{k}{i}"] = u
        else:
            out[k] = v
    return out


def emit(records, fmt, fh):
    """Write records as JSON lines or as one CSV table."""
    if fmt == "json":
        for r in records:
            fh.write(json.dumps(_json_value(r)) + "\n")
        return
    rows = [_flatten(r) for r in records]
    if not rows:
        return
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(list(rows[0]))
    for r in rows:
        writer.writerow([_csv_cell(v) for v in r.values()])


def _open_out(args):
    return open(args.out, "w", newline="") if args.out else sys.stdout


# -- subcommands --------------------------------------------------------------

def cmd_fitz(args):
    A = load_operator(args)
    records = []
    for text in args.point:
        x, xs = split_point(parse_point(text), A.dim)
        value = float(fitz_eval(A, x, xs))
        p = float(pairing(x, xs))
        records.append({"x": x, "xstar": xs, "value": value,
                        "on_graph": bool(value - p <= args.tol * (1.0 + abs(p)))})
    return records, EXIT_OK


def _rep_value(A, kind, x, xs, mode, box):
    """``(value, MinimizerReport or None)`` for one representer at one point."""
    if kind == "C":
        return float(c_rep_eval(A, x, xs)), None
    if kind == "unified":
        return float(unified_eval(A, x, xs)), None
    if kind == "A":
        # for a linear operator the dual variable is forced, so numeric mode is the closed form
        value, rep = a_rep_eval(A, x, xs, mode="closed")
        if mode == "numeric":
            rep.flags.append("forced-dual")
        return float(value), rep
    value, rep = b_rep_eval(A, x, xs, mode="collapsed", box=box)
    return float(value), rep


def cmd_rep(args):
    A = load_operator(args)
    box = parse_box(args.box[0]) if args.box else None
    records, status = [], EXIT_OK
    for text in args.point:
        x, xs = split_point(parse_point(text), A.dim)
        value, rep = _rep_value(A, args.kind, x, xs, args.mode, box)
        rec = {"kind": args.kind, "x": x, "xstar": xs, "value": value}
        if rep is not None:
            rec["argmin"] = None if rep.argmin is None else [float(v) for v in rep.argmin]
            rec["attained"] = rep.attained
            rec["flags"] = list(rep.flags)
            if args.strict and not rep.attained:
                status = EXIT_FAIL
        records.append(rec)
    return records, status


def _gap(values):
    finite = [v for v in values if math.isfinite(v)]
    if len(finite) not in (0, len(values)):
        return math.inf
    if not finite:
        return 0.0
    scale = 1.0 + max(abs(v) for v in finite)
    return (max(finite) - min(finite)) / scale


def _compare_row(task):
    M, point, box = task
    A = LinearMonotoneOperator(M, check=False)
    x, xs = point[:A.dim], point[A.dim:]
    a, _ = a_rep_eval(A, x, xs)
    b, rep = b_rep_eval(A, x, xs, box=box)
    vals = [float(a), float(b), float(c_rep_eval(A, x, xs)), float(unified_eval(A, x, xs))]
    rec = {"x": x, "xstar": xs, "A": vals[0], "B": vals[1], "C": vals[2], "unified": vals[3],
           "maxgap": _gap(vals)}
    return rec, rep.attained


def _neglog_row(task):
    point, box = task
    x, xs = float(point[0]), float(point[1])
    b, rep = b_rep_eval(neglog_pair(), x, xs, box=box)
    rec = {"x": x, "xstar": xs, "A": float(neglog_values("Arep", x, xs)), "B": float(b),
           "SepRep": float(neglog_values("SepRep", x, xs))}
    return rec, rep.attained


def _run_tasks(fn, tasks, jobs):
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, tasks))
    return [fn(t) for t in tasks]


def _sweep_grid(args, ndim, default_box, default_m):
    boxes = boxes_for(args, ndim, default_box)
    m = args.m or default_m
    return GridSpec([b[0] for b in boxes], [b[1] for b in boxes], m)


def cmd_compare(args):
    search = parse_box(args.search_box) if args.search_box else None
    if args.neglog:
        grid = _sweep_grid(args, 2, [(0.25, 2.0), (-2.0, -0.25)], 6)
        rows = _run_tasks(_neglog_row, [(p, search) for p in grid.nodes()], args.jobs)
    else:
        A = load_operator(args)
        grid = _sweep_grid(args, 2 * A.dim, (-2.0, 2.0), 9 if A.dim == 1 else 5)
        rows = _run_tasks(_compare_row, [(A.matrix, p, search) for p in grid.nodes()], args.jobs)
    status = EXIT_FAIL if args.strict and not all(ok for _, ok in rows) else EXIT_OK
    return [r for r, _ in rows], status


def cmd_verify(args):
    name = args.suite
    if name == "coincidence":
        checks = verify_mod.coincidence(tuple(range(1, args.n + 1)), trials=args.trials,
                                        points=args.points, seed=args.seed)
    elif name in ("autoconj", "graph"):
        A = load_operator(args) if (args.op or args.matrix) else None
        checks = verify_mod.SUITES[name](A)
    elif name == "sum-identity":
        checks = verify_mod.sum_identity(pairs=args.trials, seed=args.seed)
    else:
        checks = verify_mod.SUITES[name]()
    ok = all(c.passed for c in checks)
    if args.format == "json":
        return [{"check": c.name, "passed": c.passed, "measured": c.measured,
                 "tolerance": c.tolerance, "detail": c.detail} for c in checks], (EXIT_OK if ok else EXIT_FAIL)
    out = _open_out(args)
    try:
        for c in checks:
            out.write(c.line() + "\n")
        out.write(f"{name}: {'PASS' if ok else 'FAIL'} ({sum(c.passed for c in checks)}/{len(checks)})\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return None, EXIT_OK if ok else EXIT_FAIL


def _gallery_neglog(args):
    items = list(NEGLOG_ITEMS) + ["Brep"]
    search = parse_box(args.search_box) if args.search_box else None
    status = EXIT_OK
    if args.point:
        which = args.which or "Arep"
        if which not in items:
            raise UsageError(f"unknown item {which!r}; choose from {items}")
        records = []
        for text in args.point:
            x, xs = split_point(parse_point(text), 1)
            rec = {"which": which, "x": float(x[0]), "xstar": float(xs[0])}
            if which == "Brep":
                value, rep = b_rep_eval(neglog_pair(), x, xs, box=search)
                rec.update(value=float(value), attained=rep.attained, flags=list(rep.flags))
                if args.strict and not rep.attained:
                    status = EXIT_FAIL
            else:
                rec["value"] = float(neglog_values(which, x[0], xs[0]))
            records.append(rec)
        return records, status
    grid = _sweep_grid(args, 2, (-0.5, 3.0), args.m or 15)
    records = []
    for x, xs in grid.nodes():
        rec = {"x": float(x), "xstar": float(xs)}
        for w in NEGLOG_ITEMS:
            rec[w] = float(neglog_values(w, x, xs))
        rec["in_domA"] = bool(in_C(x, xs, 1.0 / math.sqrt(2.0)))
        rec["in_domB"] = bool(in_C(x, xs, 0.5))
        records.append(rec)
    return records, status


def _gallery_idfam(args):
    try:
        g = GSpec.parse(args.g)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.point:
        records = []
        for text in args.point:
            x, y = split_point(parse_point(text), 1)
            records.append({"g": str(g), "x": float(x[0]), "y": float(y[0]),
                            "value": float(id_family_eval(g, x[0], y[0]))})
        return records, EXIT_OK
    grid = _sweep_grid(args, 2, (-2.0, 2.0), 41)
    nodes = grid.nodes()
    vals = np.atleast_1d(id_family_eval(g, nodes[:, 0], nodes[:, 1]))
    return [{"x": float(a), "y": float(b), "value": float(v)} for (a, b), v in zip(nodes, vals)], EXIT_OK


def _gallery_l2demo(args):
    if args.n < 1:
        raise UsageError("--n must be positive")
    return [{"n": n, "S_n": s, "tail_bound": t} for n, s, t in energy_sequence_demo(args.n)], EXIT_OK


def cmd_gallery(args):
    return {"neglog": _gallery_neglog, "idfam": _gallery_idfam, "l2demo": _gallery_l2demo}[args.item](args)


GRAPH_FUNCTIONS = {
    "fitz": fitzpatrick_function,
    "C": c_representer,
    "A": a_representer,
    "unified": unified_representer,
}


def cmd_graph(args):
    A = load_operator(args)
    grid = _sweep_grid(args, 2 * A.dim, (-3.0, 3.0), 241 if A.dim == 1 else 21)
    G = extract_graph(GRAPH_FUNCTIONS[args.kind](A), grid, tol=args.tol)
    audit = audit_monotone(G)
    print(f"graph nodes: {len(G)}; monotone audit: {'pass' if audit.passed else 'FAIL'} "
          f"(worst pairing {audit.worst:.3e})", file=sys.stderr)
    status = EXIT_FAIL if args.strict and not audit.passed else EXIT_OK
    if args.format == "csv":
        out = _open_out(args)
        try:
            G.to_csv(out)
        finally:
            if out is not sys.stdout:
                out.close()
        return None, status
    return [{"x": x, "xstar": xs, "residual": float(r)}
            for x, xs, r in zip(G.x, G.xstar, G.residual)], status


# -- argument parser ----------------------------------------------------------

def _common(p, operator=True, fmt="json"):
    if operator:
        p.add_argument("--op", metavar="FILE", help="operator file (JSON or whitespace rows)")
        p.add_argument("--matrix", metavar="ROWS", help="inline operator, rows separated by ';'")
        p.add_argument("--mono-tol", type=float, default=1e-10, help="monotonicity tolerance")
    p.add_argument("--format", choices=("csv", "json"), default=fmt)
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")


def build_parser():
    parser = argparse.ArgumentParser(prog="autoconj",
                                     description="Autoconjugate representers of monotone operators.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fitz", help="Fitzpatrick function value and graph membership")
    _common(p)
    p.add_argument("--point", action="append", required=True, metavar="X..,XSTAR..")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_fitz)

    p = sub.add_parser("rep", help="evaluate an autoconjugate representer")
    _common(p)
    p.add_argument("--kind", choices=("A", "B", "C", "unified"), required=True)
    p.add_argument("--point", action="append", required=True, metavar="X..,XSTAR..")
    p.add_argument("--box", action="append", metavar="LO:HI", help="search box per coordinate")
    p.add_argument("--mode", choices=("closed", "numeric", "collapsed"))
    p.add_argument("--strict", action="store_true", help="exit 1 if a minimum is not attained")
    p.set_defaults(func=cmd_rep)

    p = sub.add_parser("compare", help="sweep a grid and compare A, B, C and unified")
    _common(p, fmt="csv")
    p.add_argument("--neglog", action="store_true", help="compare the -ln representers instead")
    p.add_argument("--box", action="append", metavar="LO:HI", help="sweep box (once, or per axis)")
    p.add_argument("--m", type=int, help="sweep points per axis")
    p.add_argument("--search-box", metavar="LO:HI", help="minimizer search box")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="run a named invariant suite")
    _common(p, fmt="csv")
    p.add_argument("suite", choices=sorted(verify_mod.SUITES))
    p.add_argument("--n", type=int, default=3, help="largest dimension (coincidence)")
    p.add_argument("--trials", type=int, default=20, help="random operators or pairs")
    p.add_argument("--points", type=int, default=50, help="points per operator (coincidence)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gallery", help="worked examples")
    _common(p, operator=False, fmt="csv")
    p.add_argument("item", choices=("neglog", "idfam", "l2demo"))
    p.add_argument("--which", help=f"neglog item: {', '.join(NEGLOG_ITEMS)}, Brep")
    p.add_argument("--point", action="append", metavar="X,Y")
    p.add_argument("--sweep", action="store_true", help="tabulate over --box/--m (default without --point)")
    p.add_argument("--box", action="append", metavar="LO:HI")
    p.add_argument("--m", type=int)
    p.add_argument("--search-box", metavar="LO:HI")
    p.add_argument("--g", default="energy", help="halfline, energy or power:p")
    p.add_argument("--n", type=int, default=1000000, help="truncation length (l2demo)")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_gallery)

    p = sub.add_parser("graph", help="extract the graph encoded by a representer")
    _common(p, fmt="csv")
    p.add_argument("--kind", choices=sorted(GRAPH_FUNCTIONS), default="C")
    p.add_argument("--box", action="append", metavar="LO:HI")
    p.add_argument("--m", type=int)
    p.add_argument("--tol", type=float, help="graph tolerance (default h^2)")
    p.add_argument("--strict", action="store_true", help="exit 1 if the monotone audit fails")
    p.set_defaults(func=cmd_graph)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "m", None) is not None and args.m < 3:
        parser.error("--m must be at least 3")
    if getattr(args, "tol", None) is not None and not args.tol > 0:
        parser.error("--tol must be positive")
    try:
        records, status = args.func(args)
    except MatrixParseError as exc:
        source = getattr(args, "op", None) or "--matrix"
        print(f"autoconj: parse error in {source}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except DimensionError as exc:
        print(f"autoconj: dimension mismatch: {exc}", file=sys.stderr)
        return EXIT_DIM
    except (UsageError, NotMonotoneError) as exc:
        print(f"autoconj: {exc}", file=sys.stderr)
        return EXIT_PARSE
    if records is not None:
        out = _open_out(args)
        try:
            emit(records, args.format, out)
        finally:
            if out is not sys.stdout:
                out.close()
    return status


if __name__ == "__main__":
    sys.exit(main())
