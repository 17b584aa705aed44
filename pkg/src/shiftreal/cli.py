"""Command-line front end.

Subcommands: verify, hankel-svd, stability, simulate, model-space,
weighted-demo.  Exit status is 0 when every check passes, 1 when any check
fails and 2 on usage errors.
"""
import argparse
import csv
import io
import json
import sys
import time

import numpy as np

from . import suites
from .errors import NotInnerError, ShiftRealError, SymbolParseError
from .signal import GridConfig, TimeSignal
from .symbols import parse_symbol


class UsageError(Exception):
    pass


def _add_common(p, symbol=True):
    if symbol:
        p.add_argument("--symbol", required=True, help="symbol literal, e.g. delay:1 or rational:-2/1,1")
    p.add_argument("--n", type=int, default=2**14, help="number of grid samples (power of two)")
    p.add_argument("--dt", type=float, default=2.0**-8, help="time step")
    p.add_argument("--tol", type=float, default=1e-6, help="membership tolerance (inner / model space)")
    p.add_argument("--seed", type=int, default=0, help="seed of the random inputs")
    p.add_argument("--out", default=None, help="output file (default: standard output)")
    p.add_argument("--format", choices=("json", "csv"), default=None,
                   help="output format (default: from --out suffix, else json)")


def build_parser():
    parser = argparse.ArgumentParser(prog="shiftreal", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("verify", help="full identity suite for a symbol"))

    p = sub.add_parser("hankel-svd", help="singular values of the Hankel matrix")
    _add_common(p)
    p.add_argument("--dim", type=int, default=256)

    p = sub.add_parser("stability", help="stability and group verdicts")
    _add_common(p)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--rho", type=float, default=2.0)
    p.add_argument("--margin", type=float, default=1e-3)

    p = sub.add_parser("simulate", help="output of the realization for an input read from CSV")
    _add_common(p)
    p.add_argument("--input", required=True, help="CSV file with columns t,re,im")
    p.add_argument("--mu", type=complex, default=1.0)

    _add_common(sub.add_parser("model-space", help="model-space suite (inner symbols only)"))

    p = sub.add_parser("weighted-demo", help="weighted-norm example")
    _add_common(p, symbol=False)
    p.add_argument("--n-max", type=int, default=5)
    return parser


# ------------------------------------------------------------ serialization

def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dump_json(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=_json_default) + "\n"


def dump_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def report_csv(rep):
    rows = []
    for c in rep.checks:
        rows.append([c.id, c.anchor, c.value, "" if c.tolerance is None else c.tolerance, c.status])
    return dump_csv(["id", "anchor", "value", "tolerance", "status"], rows)


def _write(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _fmt(args):
    if args.format:
        return args.format
    if args.out and args.out.lower().endswith(".csv"):
        return "csv"
    return "json"


def read_input_csv(path, grid):
    """Read t,re,im columns and interpolate onto the causal cell centres."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        t = np.array([float(r["t"]) for r in rows])
        re = np.array([float(r["re"]) for r in rows])
        im = np.array([float(r.get("im") or 0.0) for r in rows])
    except (OSError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot read input CSV {path!r}: {exc}") from None
    if t.size == 0:
        raise UsageError("input CSV has no rows")
    order = np.argsort(t)
    t, re, im = t[order], re[order], im[order]
    tc = grid.t
    inside = (tc >= t[0]) & (tc <= t[-1]) & (tc > 0)
    x = np.zeros(grid.n, dtype=complex)
    x[inside] = np.interp(tc[inside], t, re) + 1j * np.interp(tc[inside], t, im)
    return TimeSignal(grid, x, "causal")


# ---------------------------------------------------------------- commands

def _grid(args):
    try:
        return GridConfig(args.n, args.dt)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _symbol(args):
    try:
        return parse_symbol(args.symbol)
    except SymbolParseError as exc:
        raise UsageError(str(exc)) from None


def _emit_report(rep, args):
    text = dump_json(rep.as_dict()) if _fmt(args) == "json" else report_csv(rep)
    _write(text, args.out)
    return 1 if rep.failed else 0


def cmd_verify(args):
    return _emit_report(suites.run_verify(_symbol(args), _grid(args), args.seed, args.tol), args)


def cmd_model_space(args):
    sym, grid = _symbol(args), _grid(args)
    try:
        rep = suites.run_model_space(sym, grid, args.seed, args.tol)
    except NotInnerError as exc:
        raise UsageError(str(exc)) from None
    return _emit_report(rep, args)


def cmd_stability(args):
    rep = suites.run_stability(_symbol(args), _grid(args), args.alpha, args.rho, args.margin, args.seed)
    return _emit_report(rep, args)


def cmd_weighted(args):
    grid = _grid(args)
    try:
        rep = suites.run_weighted(grid, args.n_max, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if _fmt(args) == "csv":
        rows = [[r["n"], r["unweighted_norm"], r["weighted_norm"], r["ratio"]] for r in rep.data["table"]]
        _write(dump_csv(["n", "unweighted_norm", "weighted_norm", "ratio"], rows), args.out)
        return 1 if rep.failed else 0
    return _emit_report(rep, args)


def cmd_hankel_svd(args):
    sym, grid = _symbol(args), _grid(args)
    if args.dim < 1 or 2 * args.dim > grid.n:
        raise UsageError("--dim must be between 1 and n/2")
    sv = suites.hankel_spectrum(sym, grid, args.dim)
    if _fmt(args) == "csv":
        _write(dump_csv(["index", "singular_value"], [[k, float(v)] for k, v in enumerate(sv)]), args.out)
    else:
        _write(dump_json({"symbol": sym.literal, "dim": args.dim, "dt": grid.dt, "n": grid.n,
                          "singular_values": [float(v) for v in sv]}), args.out)
    return 0


def cmd_simulate(args):
    sym, grid = _symbol(args), _grid(args)
    if not args.mu.real > 0:
        raise UsageError("--mu must have positive real part")
    u = read_input_csv(args.input, grid)
    y = suites.simulate_output(sym, grid, u, args.mu)
    t = grid.t[grid.zero_index:]
    vals = y.causal_part
    if _fmt(args) == "csv":
        rows = [[float(a), float(b.real), float(b.imag)] for a, b in zip(t, vals)]
        _write(dump_csv(["t", "re", "im"], rows), args.out)
    else:
        _write(dump_json({"symbol": sym.literal, "mu": [args.mu.real, args.mu.imag],
                          "t": [float(a) for a in t], "re": [float(v) for v in vals.real],
                          "im": [float(v) for v in vals.imag]}), args.out)
    return 0


COMMANDS = {
    "verify": cmd_verify,
    "hankel-svd": cmd_hankel_svd,
    "stability": cmd_stability,
    "simulate": cmd_simulate,
    "model-space": cmd_model_space,
    "weighted-demo": cmd_weighted,
}


def run_command(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"shiftreal {args.command}: {exc}", file=sys.stderr)
        return 2
    except (ShiftRealError, ValueError) as exc:
        print(f"shiftreal {args.command}: {exc}", file=sys.stderr)
        return 2
    print(f"shiftreal {args.command}: wall time {time.perf_counter() - start:.2f} s", file=sys.stderr)
    return code


def main():
    sys.exit(run_command())


if __name__ == "__main__":
    main()
