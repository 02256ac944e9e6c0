"""Command-line surface: every experiment as one reproducible subcommand.

Output goes to stdout as CSV (leading `#` comment lines echo the inputs,
then a header row, then data rows) or as a schema-tagged JSON object.
Identical invocations produce identical bytes.  Numbers in CSV cells use
20 significant digits; exact rationals are "num/den" strings.  Errors
raised by guards print their class name to stderr and exit nonzero.
"""
from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from typing import Callable

import numpy as np
from mpmath import mp

from . import cantor, contfrac, measure, pressure, zeta
from .errors import (
    BracketError,
    ConstructionInfeasibleError,
    DivergentSeriesError,
    EnumerationGuardError,
    OutOfRangeError,
    PrecisionExhaustedError,
    UndefinedExponentError,
)
from .primes import PrimeSieve

SIEVE_ENV = "PRIMECF_SIEVE_LIMIT"

_GUARD_ERRORS = (
    BracketError,
    ConstructionInfeasibleError,
    DivergentSeriesError,
    EnumerationGuardError,
    OutOfRangeError,
    PrecisionExhaustedError,
    UndefinedExponentError,
)


# ---------------------------------------------------------------------------
# formatting


def _cell(v) -> str:
    """One CSV cell: rationals exact, reals at 20 significant digits."""
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    if isinstance(v, tuple):
        return "[" + ",".join(str(int(d)) for d in v) + "]"
    if isinstance(v, mp.mpf):
        return mp.nstr(v, 20)
    return format(float(v), ".20g")


def _echo(v) -> str:
    """Input echo for the comment line: round-trip floats, plain ints."""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ",".join(_echo(x) for x in v)
    return str(v)


def _jsonable(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (bool, int, float, str)) or v is None:
        return v
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, mp.mpf):
        return float(v)
    if isinstance(v, (tuple, list)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return float(v)


def _emit(command: str, fmt: str, inputs: dict, rows: list[dict],
          summary: dict | None = None, notes: list[str] | None = None) -> str:
    if fmt == "json":
        obj = {
            "schema": f"{command}.schema.json",
            "command": command,
            "inputs": _jsonable(inputs),
            "rows": [_jsonable(r) for r in rows],
        }
        if summary is not None:
            obj["summary"] = _jsonable(summary)
        return json.dumps(obj, indent=2) + "\n"
    buf = io.StringIO()
    buf.write("# " + command + " "
              + " ".join(f"{k}={_echo(v)}" for k, v in inputs.items()) + "\n")
    if summary:
        buf.write("# " + " ".join(f"{k}={_cell(v)}" for k, v in summary.items()) + "\n")
    for line in notes or []:
        buf.write("# " + line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    if rows:
        columns = list(rows[0].keys())
        writer.writerow(columns)
        for r in rows:
            writer.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# shared argument plumbing


def _sieve_default() -> int:
    raw = os.environ.get(SIEVE_ENV, "0")
    return int(float(raw))


def _resolve_sieve(requested: int, minimum: int) -> int:
    """The sieve limit actually used: the flag, the environment default,
    or the smallest limit the computation needs."""
    if requested > 0:
        return requested
    env = _sieve_default()
    return max(env, minimum)


def _parse_window(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"window must be 'n1,n2', got {text!r}")
    return int(parts[0]), int(parts[1])


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from None


_PHI_FUNCS: dict[str, Callable] = {"log": mp.log, "exp": mp.exp, "sqrt": mp.sqrt}
_PHI_NODES = (
    ast.Expression, ast.BinOp, ast.UnaryOp, ast.Constant, ast.Name, ast.Call,
    ast.Load, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd,
)


def parse_phi(expr: str) -> Callable[[int], mp.mpf]:
    """A growth function n -> phi(n) from an arithmetic expression in n.

    Allowed: numbers, n, + - * / **, unary sign, and log/exp/sqrt calls.
    Evaluation runs in arbitrary precision, so doubly exponential
    expressions like 2**(2**n) stay finite.
    """
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise argparse.ArgumentTypeError(f"bad phi expression {expr!r}: {exc}") from None
    for node in ast.walk(tree):
        if not isinstance(node, _PHI_NODES):
            raise argparse.ArgumentTypeError(
                f"unsupported syntax in phi expression: {type(node).__name__}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise argparse.ArgumentTypeError(f"non-numeric constant {node.value!r}")
        if isinstance(node, ast.Name) and node.id != "n" and node.id not in _PHI_FUNCS:
            raise argparse.ArgumentTypeError(f"unknown name {node.id!r} in phi")
        if isinstance(node, ast.Call):
            if (not isinstance(node.func, ast.Name) or node.func.id not in _PHI_FUNCS
                    or node.keywords):
                raise argparse.ArgumentTypeError("phi may only call log/exp/sqrt")
    code = compile(tree, "<phi>", "eval")

    def phi(n: int) -> mp.mpf:
        return eval(code, {"__builtins__": {}, **_PHI_FUNCS, "n": mp.mpf(n)})

    return phi


# ---------------------------------------------------------------------------
# subcommands


def cmd_pzeta_tail(args) -> str:
    minimum = args.cutoff if args.ell == 1 else math.isqrt(args.cutoff) + 1
    sieve = _resolve_sieve(args.sieve, minimum)
    sv = PrimeSieve(sieve)
    res = zeta.pzeta_tail(args.ell, args.mode, args.s, args.M, args.cutoff, sv)
    inputs = {"ell": args.ell, "mode": args.mode, "s": args.s, "M": args.M,
              "cutoff": args.cutoff, "sieve": sieve}
    rows = [{"value": res.value, "remainder_bound": res.remainder_bound,
             "upper": res.upper, "terms_used": res.terms_used}]
    return _emit("pzeta-tail", args.format, inputs, rows)


def cmd_pzeta_asymptotic(args) -> str:
    cutoff = args.cutoff if args.cutoff > 0 else int(max(args.grid))
    minimum = cutoff if args.ell == 1 else math.isqrt(cutoff) + 1
    sieve = _resolve_sieve(args.sieve, minimum)
    sv = PrimeSieve(sieve)
    table = zeta.asymptotic_table(args.ell, args.s, list(args.grid), cutoff, sv,
                                  mode=args.mode)
    inputs = {"ell": args.ell, "mode": args.mode, "s": args.s,
              "grid": args.grid, "cutoff": cutoff, "sieve": sieve}
    rows = [{"M": r.M, "value": r.value, "ratio": r.ratio,
             "remainder_bound": r.remainder_bound} for r in table]
    return _emit("pzeta-asymptotic", args.format, inputs, rows)


def cmd_cf_expand(args) -> str:
    if (args.rational is None) == (args.real is None):
        raise OutOfRangeError("give exactly one of --rational or --real")
    if args.rational is not None:
        x = Fraction(args.rational)
        word = contfrac.expand_rational(x.numerator, x.denominator, args.max_len)
        shown = args.rational
        bits = None
    else:
        x = Fraction(args.real)
        bits = args.bits if args.bits > 0 else None
        word = contfrac.expand_real(x, precision_bits=bits, max_len=args.max_len)
        shown = args.real
    back = contfrac.continuants(word)
    inputs = {"input": shown, "bits": 0 if bits is None else bits,
              "max_len": args.max_len}
    rows = [{"digits": tuple(word), "length": len(word),
             "reconstructed": back.value if len(word) else Fraction(0)}]
    return _emit("cf-expand", args.format, inputs, rows)


def cmd_interval_measure(args) -> str:
    sieve = _resolve_sieve(args.sieve, args.cutoff)
    sv = PrimeSieve(sieve)
    res = measure.level_set_measure(args.ell, args.threshold, args.cutoff, sv)
    inputs = {"ell": args.ell, "threshold": args.threshold,
              "cutoff": args.cutoff, "sieve": sieve}
    rows = [{"lower": res.exact_lower, "upper": res.exact_upper,
             "width": res.width, "terms": res.terms}]
    return _emit("interval-measure", args.format, inputs, rows)


def cmd_pressure_dim(args) -> str:
    problem = pressure.PressureProblem(ell=args.ell, B=args.B, M=args.M, n=args.n)
    t = pressure.dimensional_number(problem, tol=args.tol, method=args.method)
    inputs = {"ell": args.ell, "B": args.B, "M": args.M, "n": args.n,
              "tol": args.tol, "method": args.method}
    return _emit("pressure-dim", args.format, inputs, [{"t": t}])


def cmd_hwx_dim(args) -> str:
    phi = parse_phi(args.phi)
    rep = pressure.hwx_dimension(args.ell, phi, args.window, M=args.M, n=args.n,
                                 tolerance=args.tol)
    inputs = {"ell": args.ell, "phi": args.phi, "window": args.window,
              "M": args.M, "n": args.n, "tol": args.tol}
    rows = [{"value": rep.value, "case": rep.case,
             "logB": rep.exponents.logB, "logb": rep.exponents.logb,
             "skipped": len(rep.exponents.skipped)}]
    return _emit("hwx-dim", args.format, inputs, rows)


def cmd_mc_zero_one(args) -> str:
    sieve = _resolve_sieve(args.sieve, 1_000_000)
    sv = PrimeSieve(sieve)
    phi = parse_phi(args.phi)
    cfg = measure.MCExperiment(
        sample_count=args.samples, precision_bits=args.bits, window=args.window,
        phi=lambda n: float(phi(n)), ell=args.ell, seed=args.seed)
    rep = measure.run_zero_one_experiment(cfg, sv)
    inputs = {"ell": args.ell, "phi": args.phi, "window": args.window,
              "samples": args.samples, "bits": args.bits, "seed": args.seed,
              "sieve": sieve}
    rows = [{"n": n, "hits": c, "fraction": c / args.samples}
            for n, c in rep.per_n]
    summary = {"hit_fraction": rep.hit_fraction, "hit_count": rep.hit_count,
               "refinements": rep.refinements, "max_bits_used": rep.max_bits_used}
    return _emit("mc-zero-one", args.format, inputs, rows, summary=summary)


def cmd_bb_series(args) -> str:
    phi = parse_phi(args.phi)
    rep = measure.borel_bernstein_table(phi, args.ell, args.prime, args.window)
    inputs = {"ell": args.ell, "phi": args.phi,
              "prime": args.prime, "window": args.window}
    rows = [{"n": r.n, "term": r.term, "partial": r.partial} for r in rep.rows]
    summary = {"series": rep.series, "skipped": len(rep.skipped)}
    return _emit("bb-series", args.format, inputs, rows, summary=summary)


def cmd_luczak_dim(args) -> str:
    params = cantor.LuczakParams(b=float(args.b), c=float(args.c))
    sv = PrimeSieve(args.sieve) if args.sieve > 0 else None
    levels = cantor.luczak_levels(params, args.kmax, sv)
    ratios = {r.k: r.ratio for r in cantor.falconer_lower_bound(params, args.kmax)}
    limit = cantor.falconer_limit(Fraction(args.b))
    inputs = {"b": args.b, "c": args.c, "kmax": args.kmax, "sieve": args.sieve}
    rows = []
    for lv in levels:
        rows.append({
            "k": lv.k, "log_m": lv.log_m, "log_eps": lv.log_eps,
            "rosser_ok": lv.rosser_ok,
            "block_lo": "" if lv.block is None else lv.block[0],
            "block_hi": "" if lv.block is None else lv.block[1],
            "true_count": "" if lv.true_count is None else lv.true_count,
            "ratio": ratios.get(lv.k, ""),
        })
    summary = {"limit": limit, "limit_float": float(limit)}
    return _emit("luczak-dim", args.format, inputs, rows, summary=summary)


def cmd_eb_build(args) -> str:
    sieve = _resolve_sieve(args.sieve, 1_000_000)
    sv = PrimeSieve(sieve)
    params = cantor.make_eb_params(args.B, args.ell, args.s, args.delta, sv,
                                   M=args.M if args.M > 0 else None,
                                   N=args.N if args.N > 0 else None)
    depth = args.depth if args.depth > 0 else params.N + params.ell
    tree = cantor.eb_prefix_tree(params, depth, sv)
    gap = cantor.gap_check(tree)
    hold = cantor.holder_check(tree)
    inputs = {"B": args.B, "ell": args.ell, "s": args.s, "delta": args.delta,
              "M": args.M, "N": args.N, "depth": depth, "sieve": sieve}
    summary = {
        "M": params.M, "N": params.N, "t": params.t_value, "u": tree.u,
        "last_base": params.last_base,
        "alphas": "[" + ",".join(format(a, ".20g") for a in params.alphas) + "]",
        "gap_min": gap.min_normalized, "holder_exponent": hold.exponent,
        "holder_max": hold.max_ratio,
    }
    notes = [f"constraint {name} {status}: {detail}"
             for name, status, detail in params.constraints]
    rows = [{"depth": d, "word": w, "mu": mu, "diam": diam, "lo": lo, "hi": hi}
            for d, w, mu, diam, lo, hi in tree.records()]
    if args.format == "json":
        obj = {
            "schema": "eb-build.schema.json",
            "command": "eb-build",
            "inputs": _jsonable(inputs),
            "rows": [_jsonable(r) for r in rows],
            "summary": _jsonable(summary),
            "constraints": [{"name": n, "status": s, "detail": d}
                            for n, s, d in params.constraints],
        }
        return json.dumps(obj, indent=2) + "\n"
    return _emit("eb-build", args.format, inputs, rows, summary=summary, notes=notes)


def cmd_box_dim(args) -> str:
    if args.covers:
        covers = [[float(x) for x in level.split(",")]
                  for level in args.covers.split(";")]
        inputs = {"covers": args.covers}
    else:
        if args.b is None or args.c is None:
            raise OutOfRangeError("give --covers, or --b/--c/--kmax for a built construction")
        sieve = _resolve_sieve(args.sieve, 1_000_000)
        sv = PrimeSieve(sieve)
        params = cantor.LuczakParams(b=float(args.b), c=float(args.c))
        levels = cantor.luczak_levels(params, args.kmax, sv)
        covers = []
        for lv in levels:
            if lv.enumerated_words is None:
                raise OutOfRangeError(
                    f"level {lv.k} could not be enumerated within the sieve; "
                    "lower --kmax or raise --sieve")
            covers.append([float(contfrac.fundamental_interval(w).length)
                           for w in lv.enumerated_words])
        inputs = {"b": args.b, "c": args.c, "kmax": args.kmax, "sieve": sieve}
    est = cantor.box_dimension_estimate(covers)
    rows = [{"slope": est.slope, "residual": est.residual, "levels": est.levels}]
    return _emit("box-dim", args.format, inputs, rows)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="primecf",
        description="Continued fractions with large prime partial quotients: "
                    "zeta tails, interval measures, dimensions, constructions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        return p

    p = add("pzeta-tail", cmd_pzeta_tail, "truncated almost-prime zeta tail with bound")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--mode", choices=("at-most", "exactly"), default="at-most")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--M", type=float, required=True)
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--sieve", type=int, default=0)

    p = add("pzeta-asymptotic", cmd_pzeta_asymptotic,
            "normalized tail ratios along a threshold grid")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--mode", choices=("at-most", "exactly"), default="at-most")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--grid", type=_parse_grid, required=True)
    p.add_argument("--cutoff", type=int, default=0)
    p.add_argument("--sieve", type=int, default=0)

    p = add("cf-expand", cmd_cf_expand, "continued-fraction digits of a rational")
    p.add_argument("--rational", type=str, default=None, help="as num/den")
    p.add_argument("--real", type=str, default=None, help="decimal in [0,1)")
    p.add_argument("--bits", type=int, default=0,
                   help="certify digits for a 2^-bits ball (with --real)")
    p.add_argument("--max-len", type=int, default=64)

    p = add("interval-measure", cmd_interval_measure,
            "exact Lebesgue-measure bracket of a prime level set")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--cutoff", type=int, required=True)
    p.add_argument("--sieve", type=int, default=0)

    p = add("pressure-dim", cmd_pressure_dim,
            "dimensional number by bisection on the partition sum")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--method", choices=("auto", "enumerate", "collocate"),
                   default="auto")

    p = add("hwx-dim", cmd_hwx_dim, "dimension of the growth level set, with case")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--phi", type=str, required=True,
                   help="expression in n, e.g. 'n*log(n)' or '2**(2**n)'")
    p.add_argument("--window", type=_parse_window, required=True)
    p.add_argument("--M", type=int, default=20)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-9)

    p = add("mc-zero-one", cmd_mc_zero_one, "Monte Carlo hit rates for the level sets")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--phi", type=str, required=True)
    p.add_argument("--window", type=_parse_window, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--bits", type=int, default=256)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sieve", type=int, default=0)

    p = add("bb-series", cmd_bb_series, "partial sums of the criterion series")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--phi", type=str, required=True)
    p.add_argument("--window", type=_parse_window, required=True)
    p.add_argument("--prime", action="store_true",
                   help="prime-digit series instead of plain digits")

    p = add("luczak-dim", cmd_luczak_dim,
            "doubly exponential construction levels and dimension ratios")
    p.add_argument("--b", type=str, required=True)
    p.add_argument("--c", type=str, required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--sieve", type=int, default=0)

    p = add("eb-build", cmd_eb_build, "bounded-alphabet prime-run set with mass")
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--M", type=int, default=0, help="0 = search")
    p.add_argument("--N", type=int, default=0, help="0 = search")
    p.add_argument("--depth", type=int, default=0, help="0 = through first prime run")
    p.add_argument("--sieve", type=int, default=0)

    p = add("box-dim", cmd_box_dim, "box-counting slope from cover lengths")
    p.add_argument("--covers", type=str, default="",
                   help="semicolon-separated levels of comma-separated lengths")
    p.add_argument("--b", type=str, default=None)
    p.add_argument("--c", type=str, default=None)
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--sieve", type=int, default=0)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.func(args)
    except _GUARD_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
