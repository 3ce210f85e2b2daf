"""Command-line interface.

Exit codes: 0 success, 1 usage or parse error, 2 iteration budget
exhausted, 3 verification or round-trip failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Callable, Optional, Sequence

from . import bounds, reference
from .codec import RecordError, emit_record, header_for, parse_record, recover_input
from .core import CAParams, format_array, parse_array, verify_ca
from .engine import InputStream, run
from .optimizer import OptimizerError, d_bound_from_f0, optimum
from .predictor import (ROUTES, VacuousBound, curve_csv, figure_curve, k_range,
                        read_best_known, regression_slope, smallest_m)

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_VERIFY = 0, 1, 2, 3
THREADS_ENV = "ENTCA_THREADS"


class UsageError(Exception):
    pass


def fmt2(x: float) -> str:
    """Two decimals, half-up."""
    if math.isinf(x):
        return "inf"
    return str(Decimal(repr(x)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be an integer") from None


def _pmap(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


class Out:
    """Collects output so every command renders text, csv or json from
    the same data."""

    def __init__(self, fmt: str, config: dict):
        self.fmt = fmt
        self.config = config

    def emit(self, payload: dict, text: str, csv_rows: Optional[list[list]] = None) -> None:
        if self.fmt == "json":
            print(json.dumps({"config": self.config, **payload}, indent=2, sort_keys=True))
            return
        if self.fmt == "csv":
            print("# config: " + json.dumps(self.config, sort_keys=True), file=sys.stderr)
            buf = io.StringIO()
            csv.writer(buf, lineterminator="\n").writerows(csv_rows or [])
            sys.stdout.write(buf.getvalue())
            return
        print("# config: " + json.dumps(self.config, sort_keys=True))
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _config(args, **extra) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k != "func"}
    cfg.update(extra)
    return cfg


# -- construct / verify / replay ------------------------------------------------

def cmd_construct(args) -> int:
    m_source = "given"
    m = args.m
    if m is None:
        try:
            m = smallest_m(args.t, args.k, args.v, "optimized").m
        except (ValueError, VacuousBound) as e:
            raise UsageError(str(e)) from None
        m_source = "predicted (optimized route)"
    try:
        params = CAParams(args.t, args.k, args.v, m)
    except (TypeError, ValueError) as e:
        raise UsageError(str(e)) from None
    if args.budget < 0:
        raise UsageError("budget must be non-negative")
    out = Out(args.format, _config(args, m=m, m_source=m_source, N=params.N))
    result = run(params, InputStream.seeded(params, args.seed, args.budget))
    Path(args.array).write_text(format_array(result.array))
    Path(args.record).write_text(emit_record(header_for(result.array, args.seed), result.record))
    report = verify_ca(result.array)
    status = "success" if result.success else "budget exhausted"
    payload = {
        "success": result.success,
        "iterations": result.iterations_used,
        "m": m, "N": params.N,
        "array_path": args.array, "record_path": args.record,
        "verify": report.to_dict(),
    }
    text = (f"m = {m} ({m_source}), N = {params.N}\n"
            f"{status} after {result.iterations_used} iterations\n"
            f"{report.summary()}\n"
            f"array -> {args.array}\nrecord -> {args.record}")
    out.emit(payload, text, [["success", "iterations", "m", "N"],
                             [int(result.success), result.iterations_used, m, params.N]])
    if result.success and not report.valid:
        return EXIT_VERIFY
    return EXIT_OK if result.success else EXIT_BUDGET


def _read_array(path: str):
    try:
        return parse_array(Path(path).read_text())
    except OSError as e:
        raise UsageError(str(e)) from None
    except ValueError as e:
        raise UsageError(f"{path}: {e}") from None


def _read_best_known(path: str) -> list[tuple[int, int, int, int]]:
    try:
        return read_best_known(Path(path).read_text())
    except OSError as e:
        raise UsageError(str(e)) from None
    except ValueError as e:
        raise UsageError(f"{path}: {e}") from None


def cmd_verify(args) -> int:
    A = _read_array(args.path)
    report = verify_ca(A)
    out = Out(args.format, _config(args))
    lines = [report.summary()]
    if report.empty_slots:
        lines.append("empty columns: " + " ".join(map(str, report.empty_slots)))
    for tau, miss in report.failures[: args.max_failures]:
        lines.append(f"columns {tau} miss {miss}")
    if len(report.failures) > args.max_failures:
        lines.append(f"... {len(report.failures) - args.max_failures} more")
    rows = [["columns", "missing"]] + [[" ".join(map(str, tau)), " ".join(map(str, miss))]
                                       for tau, miss in report.failures]
    out.emit(report.to_dict(), "\n".join(lines), rows)
    return EXIT_OK if report.valid else EXIT_VERIFY


def cmd_replay(args) -> int:
    A = _read_array(args.array)
    try:
        header, record = parse_record(Path(args.record).read_text())
    except OSError as e:
        raise UsageError(str(e)) from None
    except RecordError as e:
        raise UsageError(f"{args.record}: {e}") from None
    out = Out(args.format, _config(args))
    if (header.t, header.k, header.v, header.n_rows) != (A.t, A.k, A.v, A.n_rows):
        out.emit({"roundtrip": False, "reason": "header mismatch"},
                 "round-trip FAILED: record header does not match the array")
        return EXIT_VERIFY
    try:
        params = CAParams(A.t, A.k, A.v, A.n_rows // A.v)
        inputs = recover_input(A, record)
        again = run(params, InputStream.explicit(params, inputs))
    except (RecordError, ValueError) as e:
        out.emit({"roundtrip": False, "reason": str(e)}, f"round-trip FAILED: {e}")
        return EXIT_VERIFY
    same = (again.array == A and again.record == record
            and emit_record(header, again.record) == emit_record(header, record))
    payload = {"roundtrip": same, "iterations": len(record), "inputs_recovered": len(inputs)}
    text = (f"recovered {len(inputs)} input columns; "
            + ("round-trip OK" if same else "round-trip FAILED: re-run differs"))
    out.emit(payload, text, [["roundtrip", "iterations"], [int(same), len(record)]])
    return EXIT_OK if same else EXIT_VERIFY


# -- tables -------------------------------------------------------------------------

def _opt_cell(tv: tuple[int, int]):
    t, v = tv
    try:
        res = optimum(t, v)
    except OptimizerError as e:
        return tv, None, str(e)
    return tv, res, None


def _table1(args) -> tuple[list[str], list[list], list[str]]:
    ts, vs = range(2, 7), range(2, 11)
    opt = {tv: (res, err) for tv, res, err in
           _pmap(_opt_cell, [(t, v) for t in ts if t >= 4 for v in vs], _threads(args))}
    notes = []
    rows = []
    for v in vs:
        row: list = [v]
        for t in ts:
            if t < 4:
                row.append(bounds.table1_bound(t, v).value)
                continue
            res, err = opt[(t, v)]
            if res is None:
                row.append(None)
                notes.append(f"t={t} v={v}: FAIL ({err})")
                continue
            val = d_bound_from_f0(t, v, res.f0).value
            row.append(val)
            pub = reference.OPTIMIZED[(t, v)]
            if fmt2(val) != fmt2(pub) and val > pub:
                notes.append(f"t={t} v={v}: computed {val:.4f} > published {pub} "
                             f"(f0={res.f0:.10f} at x={tuple(round(a, 10) for a in res.best.x)})")
        rows.append(row)
    return ["v\\t"] + [str(t) for t in ts], rows, notes


def _table2(args) -> tuple[list[str], list[list], list[str]]:
    vs = range(2, 11)
    slope_row: list = ["regression slope"] + [None] * len(vs)
    notes = []
    if args.best_known:
        data = _read_best_known(args.best_known)
        for j, v in enumerate(vs, start=1):
            pts = [(k, n) for t, k, vv, n in data if t == 2 and vv == v]
            if len({k for k, _ in pts}) >= 2:
                slope_row[j] = regression_slope(pts)
    else:
        notes.append("regression slope: n/a (pass --best-known CSV)")
    rows = [
        ["LLL-classic"] + [bounds.d_bound_lll_classic(2, v).value for v in vs],
        ["EC-general"] + [bounds.d_bound_ec_general(2, v).value for v in vs],
        ["EC-t2"] + [bounds.d_bound_t2(v).value for v in vs],
        ["juxtaposition C(v,2)"] + [bounds.juxtaposition_d2(v) for v in vs],
        slope_row,
        ["known d(2,v)=v/2"] + [bounds.known_d2(v) for v in vs],
    ]
    return ["d(2,v) \\ v"] + [str(v) for v in vs], rows, notes


def _table3(args) -> tuple[list[str], list[list], list[str]]:
    vs = range(2, 8)
    opt = _pmap(_opt_cell, [(6, v) for v in vs], _threads(args))
    opt_row: list = ["EC-optimized"]
    notes = []
    for (_, v), res, err in opt:
        if res is None:
            opt_row.append(None)
            notes.append(f"v={v}: FAIL ({err})")
        else:
            opt_row.append(d_bound_from_f0(6, v, res.f0).value)
    rows = [
        ["LLL-classic"] + [bounds.d_bound_lll_classic(6, v).value for v in vs],
        ["EC-general"] + [bounds.d_bound_ec_general(6, v).value for v in vs],
        opt_row,
    ]
    return ["d(6,v) \\ v"] + [str(v) for v in vs], rows, notes


def _cell(x) -> str:
    if x is None:
        return "n/a"
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    return fmt2(x)


def cmd_table(args) -> int:
    build = {1: _table1, 2: _table2, 3: _table3}[args.which]
    header, rows, notes = build(args)
    if args.which == 1:
        # optimizer failures surface per cell
        rendered = [[str(r[0])] + ["FAIL" if x is None else _cell(x) for x in r[1:]] for r in rows]
    else:
        rendered = [[str(r[0])] + [_cell(x) for x in r[1:]] for r in rows]
    widths = [max(len(header[j]), *(len(r[j]) for r in rendered)) for j in range(len(header))]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rendered]
    lines += [f"note: {n}" for n in notes]
    payload = {"table": args.which, "header": header,
               "rows": [[r[0]] + [None if x is None else x for x in r[1:]] for r in rows],
               "notes": notes}
    Out(args.format, _config(args)).emit(payload, "\n".join(lines), [header] + rendered)
    return EXIT_OK


# -- predict / curve -------------------------------------------------------------

def _routes(route: str) -> list[str]:
    return list(ROUTES) if route == "both" else [route]


def cmd_predict(args) -> int:
    preds = []
    for route in _routes(args.route):
        try:
            preds.append(smallest_m(args.t, args.k, args.v, route))
        except (ValueError, VacuousBound) as e:
            raise UsageError(str(e)) from None
    lines, rows = [], [["route", "m", "N", "rhs(m-1)", "rhs(m)"]]
    for p in preds:
        prev = "n/a" if p.rhs_at_m_minus_1 is None else f"{p.rhs_at_m_minus_1:.6g}"
        lines.append(f"{p.route}: m = {p.m}, N = {p.N}; rhs(m-1) = {prev} >= 1 > "
                     f"rhs(m) = {p.rhs_at_m:.6g}")
        rows.append([p.route, p.m, p.N, prev, f"{p.rhs_at_m:.6g}"])
    payload = {"predictions": [
        {"route": p.route, "m": p.m, "N": p.N, "log_rhs_m": p.log_rhs_at_m,
         "log_rhs_m_minus_1": p.log_rhs_at_m_minus_1} for p in preds]}
    Out(args.format, _config(args)).emit(payload, "\n".join(lines), rows)
    return EXIT_OK


def cmd_curve(args) -> int:
    try:
        ks = k_range(args.k)
        if ks[0] < args.t:
            raise ValueError("k range must start at k >= t")
        series = {r: figure_curve(args.t, args.v, ks, r) for r in _routes(args.route)}
    except (ValueError, VacuousBound) as e:
        raise UsageError(str(e)) from None
    text = "".join(
        curve_csv(pts, r, args.t, args.v) if i == 0
        else curve_csv(pts, r, args.t, args.v).split("\n", 1)[1]
        for i, (r, pts) in enumerate(series.items()))
    if args.out:
        Path(args.out).write_text(text)
    if args.plot:
        from .plotting import plot_curves
        best = None
        if args.best_known:
            best = sorted((k, n) for t, k, v, n in _read_best_known(args.best_known)
                          if t == args.t and v == args.v)
        plot_curves(series, args.plot, args.t, args.v, best)
    cfg = _config(args)
    if args.format == "json":
        Out("json", cfg).emit({"curves": {r: [list(p) for p in pts] for r, pts in series.items()}}, "")
    else:
        print("# config: " + json.dumps(cfg, sort_keys=True), file=sys.stderr)
        if not args.out:
            sys.stdout.write(text)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entca", description=__doc__.split("\n")[0] or None)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("text", "csv", "json")):
        sp.add_argument("--format", choices=formats, default="text")
        return sp

    sp = common(sub.add_parser("construct", help="build an array with the constructor"))
    sp.add_argument("-t", type=int, required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-v", type=int, required=True)
    sp.add_argument("-m", type=int, help="symbol multiplicity (default: predicted)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--budget", type=int, default=10**6)
    sp.add_argument("--array", default="ca.txt")
    sp.add_argument("--record", default="ca.rec")
    sp.set_defaults(func=cmd_construct)

    sp = common(sub.add_parser("verify", help="check an array file"))
    sp.add_argument("path")
    sp.add_argument("--max-failures", type=int, default=20)
    sp.set_defaults(func=cmd_verify)

    sp = common(sub.add_parser("replay", help="decode a record and re-run it"))
    sp.add_argument("array")
    sp.add_argument("record")
    sp.set_defaults(func=cmd_replay)

    sp = common(sub.add_parser("table", help="recompute a bound table"))
    sp.add_argument("which", type=int, choices=(1, 2, 3))
    sp.add_argument("--best-known", help="CSV t,k,v,N for the regression row")
    sp.add_argument("--threads", type=int, help=f"worker processes (default ${THREADS_ENV} or 1)")
    sp.set_defaults(func=cmd_table)

    sp = common(sub.add_parser("predict", help="smallest certified m for (t, k, v)"))
    sp.add_argument("-t", type=int, required=True)
    sp.add_argument("-k", type=int, required=True)
    sp.add_argument("-v", type=int, required=True)
    sp.add_argument("--route", choices=ROUTES + ("both",), default="both")
    sp.set_defaults(func=cmd_predict)

    sp = common(sub.add_parser("curve", help="predicted N over a range of k"), ("csv", "json"))
    sp.add_argument("-t", type=int, required=True)
    sp.add_argument("-v", type=int, required=True)
    sp.add_argument("--k", required=True, help="start:stop[:log|lin[:count]]")
    sp.add_argument("--route", choices=ROUTES + ("both",), default="optimized")
    sp.add_argument("--out", help="CSV path (default stdout)")
    sp.add_argument("--plot", help="also render the curves to this image file")
    sp.add_argument("--best-known", help="CSV t,k,v,N drawn as points on the plot")
    sp.set_defaults(func=cmd_curve)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
