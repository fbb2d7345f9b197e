"""Command line runner: ``lmoment {alpha,lvalues,scan,identity,tij,fit}``.

All logarithms are natural.  Output is CSV (UTF-8, LF, shortest round-trip
floats) on stdout or ``--out``; ``--json`` switches to one JSON object per
line with the same field names.  ``--bless`` also writes the output into
the golden directory so later runs can be checked against it.

Exit codes: 0 success, 2 usage error, 3 size guard, 4 identity failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import arith, constants, counting
from .arith import GuardError
from .averages import ModulusData, breakdown, identity_sides, m2
from .characters import build_group
from .lvalues import class_partial_sums, digamma_table, l_one, l_one_oracle, harmonic_class_table

EXIT_OK, EXIT_USAGE, EXIT_GUARD, EXIT_IDENTITY = 0, 2, 3, 4
IDENTITY_TOLERANCE = 1e-8
GOLDEN_SLOPE_BAND = 0.05

SCAN_COLUMNS = [
    "q", "N", "S_direct", "S_proxy", "M1", "M2", "principal_term",
    "alpha", "alpha_error_bound", "ratio", "wall_time_ms", "warning",
]
ALPHA_COLUMNS = ["q", "beta", "gamma", "gamma_tail_bound", "alpha"]
LVALUE_COLUMNS = ["index", "exponents", "parity", "L_re", "L_im", "L_abs", "error_bound", "method"]
IDENTITY_COLUMNS = ["q", "N", "character_side", "congruence_side", "residual", "ok"]
TIJ_COLUMNS = ["i", "j", "T_brute", "T_divisor", "equal"]
FIT_COLUMNS = [
    "q", "points", "slope", "intercept", "residual_rms",
    "gap_to_exponent_3", "gap_to_exponent_2", "golden_slope", "within_golden_band",
]


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residual_rms: float


def fit_loglog(ns, values) -> FitResult:
    """Least squares line through (ln N, ln value)."""
    if len(ns) < 4:
        raise ValueError("a log-log fit needs at least 4 points")
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return FitResult(float(slope), float(intercept), float(np.sqrt(np.mean(resid**2))))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(v):
    if isinstance(v, np.floating):
        return float(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(rows: list[dict], columns: list[str], as_json: bool) -> str:
    buf = io.StringIO()
    if as_json:
        for row in rows:
            buf.write(json.dumps({c: _jsonable(row.get(c)) for c in columns}) + "\n")
        return buf.getvalue()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(row.get(c)) for c in columns])
    return buf.getvalue()


def read_golden_csv(path: Path) -> list[dict]:
    with path.open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _n_list(text: str) -> list[int]:
    try:
        out = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--n expects a comma separated list of integers, got {text!r}")
    if not out or any(n < 1 for n in out):
        raise argparse.ArgumentTypeError("--n values must be positive integers")
    return out


def _modulus(text: str) -> int:
    q = int(text)
    if q < 2:
        raise argparse.ArgumentTypeError("--q must be at least 2")
    return q


# ---------------------------------------------------------------- commands

def cmd_alpha(args) -> tuple[list[dict], list[str]]:
    f = arith.factorize(args.q)
    g = constants.gamma(f, args.trunc)
    a = constants.alpha(f, args.trunc)
    row = {"q": args.q, "beta": constants.beta(f), "gamma": g.value, "gamma_tail_bound": g.error, "alpha": a.value}
    return [row], ALPHA_COLUMNS


def cmd_lvalues(args) -> tuple[list[dict], list[str]]:
    group = build_group(args.q)
    rows = []
    if args.oracle:
        m = args.oracle
        sums = class_partial_sums(args.q, m)
        evaluate = lambda chi: l_one_oracle(chi, m, sums)  # noqa: E731
    else:
        table = digamma_table(args.q)
        evaluate = lambda chi: l_one(chi, table)  # noqa: E731
    for chi in group:
        if chi.is_principal:
            continue
        lv = evaluate(chi)
        rows.append({
            "index": chi.index,
            "exponents": " ".join(map(str, chi.exponents)),
            "parity": chi.parity,
            "L_re": lv.value.real,
            "L_im": lv.value.imag,
            "L_abs": abs(lv.value),
            "error_bound": float(lv.error_bound),
            "method": lv.method,
        })
    return rows, LVALUE_COLUMNS


def scan_rows(q: int, ns: list[int], trunc: int, threads: int | None = None, timings: bool = False) -> list[dict]:
    data = ModulusData(q, trunc).warm()

    def one(n: int) -> dict:
        t0 = time.perf_counter()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            b = breakdown(data, n)
        elapsed = (time.perf_counter() - t0) * 1e3
        return {
            "q": q, "N": n, "S_direct": b.s_direct, "S_proxy": b.s_proxy, "M1": b.m1, "M2": b.m2,
            "principal_term": b.principal_term, "alpha": b.alpha, "alpha_error_bound": b.alpha_error,
            "ratio": b.ratio, "wall_time_ms": round(elapsed, 3) if timings else None,
            "warning": "N>=q" if n >= q else "",
        }

    workers = threads or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, ns))  # map keeps input order


def cmd_scan(args) -> tuple[list[dict], list[str]]:
    return scan_rows(args.q, args.n, args.trunc, args.threads, args.timings), SCAN_COLUMNS


def cmd_identity(args) -> tuple[list[dict], list[str]]:
    rows = []
    for n in args.n:
        lhs, rhs = identity_sides(args.q, n)
        residual = abs(lhs - rhs) / rhs
        rows.append({
            "q": args.q, "N": n, "character_side": lhs, "congruence_side": rhs,
            "residual": residual, "ok": residual <= IDENTITY_TOLERANCE,
        })
    return rows, IDENTITY_COLUMNS


def cmd_tij(args) -> tuple[list[dict], list[str]]:
    if len(args.n) != 1:
        raise SystemExit("tij takes a single --n value")
    return counting.t_table(args.q, args.n[0]), TIJ_COLUMNS


def m2_series(q: int, ns: list[int], threads: int | None = None) -> list[float]:
    table = harmonic_class_table(q)
    with ThreadPoolExecutor(max_workers=threads or os.cpu_count() or 1) as pool:
        return list(pool.map(lambda n: m2(q, n, table), ns))


def cmd_fit(args) -> tuple[list[dict], list[str]]:
    if len(args.n) < 4:
        raise ValueError("fit needs at least 4 values of N")
    values = m2_series(args.q, args.n, args.threads)
    fit = fit_loglog(args.n, values)
    golden = golden_path(args, "fit")
    g_slope = None
    if golden.exists() and not args.bless:
        g_slope = float(read_golden_csv(golden)[0]["slope"])
    row = {
        "q": args.q, "points": len(args.n), "slope": fit.slope, "intercept": fit.intercept,
        "residual_rms": fit.residual_rms, "gap_to_exponent_3": fit.slope - 3.0,
        "gap_to_exponent_2": fit.slope - 2.0, "golden_slope": g_slope,
        "within_golden_band": None if g_slope is None else abs(fit.slope - g_slope) <= GOLDEN_SLOPE_BAND,
    }
    return [row], FIT_COLUMNS


COMMANDS = {
    "alpha": cmd_alpha,
    "lvalues": cmd_lvalues,
    "scan": cmd_scan,
    "identity": cmd_identity,
    "tij": cmd_tij,
    "fit": cmd_fit,
}


def golden_path(args, command: str) -> Path:
    name = f"{command}_q{args.q}"
    if command == "alpha":
        name += f"_T{args.trunc}"
    return Path(args.golden_dir) / f"{name}.{'jsonl' if args.json else 'csv'}"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=_modulus, required=True, help="modulus q >= 2")
    common.add_argument("--trunc", type=int, default=constants.DEFAULT_TRUNC,
                        help="cutoff T (m + n <= T) for the gamma_q series")
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    common.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")
    common.add_argument("--json", action="store_true", help="emit JSON lines instead of CSV")
    common.add_argument("--bless", action="store_true", help="also write the output into the golden directory")
    common.add_argument("--golden-dir", default="golden", help="golden file directory (default: ./golden)")

    parser = argparse.ArgumentParser(
        prog="lmoment",
        description="Weighted second moments of L(1, chi) and the quantities of their "
        "congruence-side decomposition. Logarithms are natural throughout.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("alpha", parents=[common], help="beta_q, gamma_q, alpha_q")
    p = sub.add_parser("lvalues", parents=[common], help="L(1, chi) for every nonprincipal chi mod q")
    p.add_argument("--oracle", type=int, default=None, metavar="M",
                   help="use the partial sum up to M instead of the digamma formula")
    p = sub.add_parser("scan", parents=[common], help="S, proxy, M1, M2 and ratio for each N")
    p.add_argument("--n", type=_n_list, required=True, help="comma separated N values")
    p.add_argument("--timings", action="store_true", help="fill the wall_time_ms column")
    p = sub.add_parser("identity", parents=[common], help="character side vs congruence side")
    p.add_argument("--n", type=_n_list, required=True)
    p = sub.add_parser("tij", parents=[common], help="block counts T_ij by both routes")
    p.add_argument("--n", type=_n_list, required=True)
    p = sub.add_parser("fit", parents=[common], help="log-log slope of M2 against N")
    p.add_argument("--n", type=_n_list, required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows, columns = COMMANDS[args.command](args)
    except GuardError as exc:
        print(f"lmoment: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ValueError, ArithmeticError) as exc:
        print(f"lmoment: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(rows, columns, args.json)
    if args.out is not None:
        args.out.write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)
    if args.bless:
        path = golden_path(args, args.command)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
        print(f"lmoment: blessed {path}", file=sys.stderr)
    if args.command == "identity" and not all(r["ok"] for r in rows):
        return EXIT_IDENTITY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
