"""Command-line interface: ``typreal {bound,extremizer,table,verify,kernel}``.

Exit codes: 0 success, 1 certification failure, 2 usage error.
Floats are written in shortest round-trip form (``repr``), except the text
form of ``bound``, which prints 17 decimals.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Sequence

from .chebyshev import spectral_params
from .extremal import extremizer
from .pencil import sharp_bound
from .validate import DEFAULT_SEED, certify

MAX_DEGREE = 500
# 2520 = lcm(1..10): the kernel zeros 2 pi/(n+3) of small odd degrees fall on the grid
DEFAULT_KERNEL_POINTS = 2519
SEED_ENV = "EXTREMAL_SEED"


class UsageError(Exception):
    pass


# -- records ----------------------------------------------------------------

def _num(x: float) -> float | None:
    x = float(x)
    return None if math.isnan(x) else x


def _params(n: int) -> dict:
    sp = spectral_params(n)
    rec = {"n": n, "parity": sp.parity, "bound": sharp_bound(n)}
    if sp.parity == "odd":
        rec["mu"] = sp.mu
    else:
        rec["eta"] = sp.eta
        rec["nu"] = sp.nu
    return rec


def bound_record(n: int) -> dict:
    return _params(n)


def extremizer_record(n: int, which: str) -> dict:
    p = extremizer(n, which)
    rec = _params(n)
    rec["which"] = which
    rec["coefficients"] = [float(a) for a in p.coeffs]
    rec["p_at_1"] = float(p(1.0))
    rec["p_at_minus_1"] = float(p(-1.0))
    return rec


def table_record(n: int) -> dict:
    rec = _params(n)
    rec["coefficients"] = [float(a) for a in extremizer(n).coeffs]
    return rec


def verify_record(n: int, seed: int) -> dict:
    rec = table_record(n)
    report = certify(n, seed)
    diag = {}
    for key, val in report.as_dict().items():
        if key == "n":
            continue
        diag[key] = _num(val) if isinstance(val, float) else val
    rec["diagnostics"] = diag
    return rec


def kernel_record(n: int, points: int) -> dict:
    p = extremizer(n)
    t = [k * math.pi / (points + 1) for k in range(1, points + 1)]
    vals = p.im_on_circle(t)
    return {"n": n, "parity": "odd" if n % 2 else "even", "points": points,
            "t": t, "values": [float(v) for v in vals]}


# -- formatting -------------------------------------------------------------

def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def _spectral_text(rec: dict) -> str:
    if rec["parity"] == "odd":
        return f"mu={rec['mu']!r}"
    return f"eta={rec['eta']!r} nu={rec['nu']!r}"


def format_bound(rec: dict, fmt: str) -> str:
    if fmt == "json":
        return _dumps(rec) + "\n"
    if fmt == "csv":
        keys = list(rec)
        return _csv(keys, [[rec[k] for k in keys]])
    return f"N={rec['n']} {rec['parity']} bound={rec['bound']:.17f} {_spectral_text(rec)}\n"


def format_extremizer(rec: dict, fmt: str) -> str:
    if fmt == "json":
        return _dumps(rec) + "\n"
    coeffs = rec["coefficients"]
    if fmt == "csv":
        header = ["n", "parity", "which", "p_at_1", "p_at_minus_1"]
        header += [f"a{j}" for j in range(1, len(coeffs) + 1)]
        return _csv(header, [[rec["n"], rec["parity"], rec["which"], rec["p_at_1"],
                              rec["p_at_minus_1"], *coeffs]])
    body = ", ".join(repr(a) for a in coeffs)
    return (f"N={rec['n']} {rec['parity']} {rec['which']} coefficients=[{body}] "
            f"P(1)={rec['p_at_1']!r} P(-1)={rec['p_at_minus_1']!r}\n")


def format_table(recs: list[dict], fmt: str, top: int) -> str:
    if fmt == "json":
        return _dumps(recs) + "\n"
    if fmt == "csv":
        header = ["n", "parity", "bound"] + [f"a{j}" for j in range(2, top + 1)]
        rows = []
        for r in recs:
            tail = r["coefficients"][1:]
            rows.append([r["n"], r["parity"], r["bound"], *tail] + [None] * (top - 1 - len(tail)))
        return _csv(header, rows)
    lines = []
    for r in recs:
        tail = " ".join(repr(a) for a in r["coefficients"][1:])
        lines.append(f"N={r['n']} {r['parity']} bound={r['bound']:.17f} a2..aN: {tail}")
    return "\n".join(lines) + "\n"


_DIAG_KEYS = ("bound_closed", "bound_oracle", "min_im_on_grid", "argmin_t", "pencil_residual",
              "recurrence_residual", "pipeline_vs_closed_gap", "factorization_gap", "passed",
              "failed_stage")


def _summary(recs: list[dict]) -> tuple[int, int, str]:
    ok = sum(r["diagnostics"]["passed"] for r in recs)
    bad = len(recs) - ok
    return ok, bad, f"verified {len(recs)} degrees: {ok} passed, {bad} failed"


def format_verify(recs: list[dict], fmt: str, seed: int) -> tuple[str, str]:
    """Returns (stdout, stderr) text."""
    ok, bad, line = _summary(recs)
    if fmt == "json":
        doc = {"seed": seed, "passed": ok, "failed": bad, "reports": recs}
        return _dumps(doc) + "\n", ""
    if fmt == "csv":
        header = ["n", "parity", "bound", *_DIAG_KEYS]
        rows = [[r["n"], r["parity"], r["bound"], *(r["diagnostics"][k] for k in _DIAG_KEYS)]
                for r in recs]
        return _csv(header, rows), line + "\n"
    out = []
    for r in recs:
        d = r["diagnostics"]
        status = "PASS" if d["passed"] else f"FAIL[{d['failed_stage']}]"
        out.append(
            f"N={r['n']} {r['parity']} {status} bound={r['bound']!r} "
            f"oracle_gap={_gap(d['bound_oracle'], d['bound_closed'])} "
            f"min_im={d['min_im_on_grid']!r} pencil={d['pencil_residual']!r} "
            f"det={d['recurrence_residual']!r} coeff={d['pipeline_vs_closed_gap']!r} "
            f"factor={d['factorization_gap']!r}")
    out.append(line)
    return "\n".join(out) + "\n", ""


def _gap(a, b):
    return None if a is None or b is None else abs(a - b)


def format_kernel(rec: dict, fmt: str) -> str:
    if fmt == "json":
        return _dumps(rec) + "\n"
    pairs = list(zip(rec["t"], rec["values"]))
    if fmt == "csv":
        return _csv(["t", "value"], pairs)
    return "".join(f"{t!r} {v!r}\n" for t, v in pairs)


# -- commands ---------------------------------------------------------------

def _check_degree(n: int, top: int | None = None) -> None:
    if n < 2:
        raise UsageError(f"degree must be >= 2, got {n}")
    if top is not None and n > top:
        raise UsageError(f"degree must be <= {top}, got {n}")


def _check_range(lo: int, hi: int) -> None:
    if not 2 <= lo <= hi <= MAX_DEGREE:
        raise UsageError(f"need 2 <= from <= to <= {MAX_DEGREE}, got from={lo} to={hi}")


def cmd_bound(args) -> int:
    _check_degree(args.n)
    sys.stdout.write(format_bound(bound_record(args.n), args.format))
    return 0


def cmd_extremizer(args) -> int:
    _check_degree(args.n)
    sys.stdout.write(format_extremizer(extremizer_record(args.n, args.which), args.format))
    return 0


def cmd_table(args) -> int:
    _check_range(args.from_, args.to)
    recs = [table_record(n) for n in range(args.from_, args.to + 1)]
    sys.stdout.write(format_table(recs, args.format, args.to))
    return 0


def _resolve_seed(flag: int) -> int:
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return flag
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def cmd_verify(args) -> int:
    if args.n is not None:
        if args.from_ is not None or args.to is not None:
            raise UsageError("use either --n or --from/--to")
        _check_degree(args.n, MAX_DEGREE)
        degrees = [args.n]
    else:
        if args.from_ is None or args.to is None:
            raise UsageError("verify needs --n or both --from and --to")
        _check_range(args.from_, args.to)
        degrees = list(range(args.from_, args.to + 1))
    seed = _resolve_seed(args.seed)
    recs = [verify_record(n, seed) for n in degrees]
    out, err = format_verify(recs, args.format, seed)
    sys.stdout.write(out)
    if err:
        sys.stderr.write(err)
    return 0 if all(r["diagnostics"]["passed"] for r in recs) else 1


def cmd_kernel(args) -> int:
    _check_degree(args.n)
    if args.points < 2:
        raise UsageError(f"--points must be >= 2, got {args.points}")
    sys.stdout.write(format_kernel(kernel_record(args.n, args.points), args.format))
    return 0


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "csv", "text"), default="text")

    parser = argparse.ArgumentParser(
        prog="typreal",
        description="Sharp a2 bounds and extremal typically real polynomials.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bound", parents=[fmt], help="sharp bound on |a2| for degree n")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("extremizer", parents=[fmt], help="coefficients of the extremal polynomial")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--which", choices=("max", "min"), default="max")
    p.set_defaults(func=cmd_extremizer)

    p = sub.add_parser("table", parents=[fmt], help="bounds and coefficients for a degree range")
    p.add_argument("--from", dest="from_", type=int, required=True)
    p.add_argument("--to", type=int, required=True)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", parents=[fmt], help="run the certification checks")
    p.add_argument("--n", type=int)
    p.add_argument("--from", dest="from_", type=int)
    p.add_argument("--to", type=int)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"seed for random determinant abscissae (overridden by ${SEED_ENV})")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("kernel", parents=[fmt], help="sample Im P(e^{it}) of the maximizer on (0, pi)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--points", type=int, default=DEFAULT_KERNEL_POINTS)
    p.set_defaults(func=cmd_kernel)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"typreal {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
