"""Command-line surface: classification, single-q moments, identity
verification suites, prime sweeps and oracle runs, with CSV/JSON output.

Exit codes: 0 success, 1 validation error, 2 identity-check failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from fractions import Fraction
from typing import Optional

from .bias import (
    SweepPolicy,
    averages,
    chebotarev_average,
    predicted_bias,
    stratify,
    sweep,
    sweep_csv_lines,
    write_sweep_csv,
)
from .counting import (
    DegenerateReductionError,
    GRID_QMAX_DEFAULT,
    NonTypicalReductionError,
    THREEFOLD_QMAX_DEFAULT,
    count_bundle,
    count_delta_side,
    count_C_side,
    grid_counts_brute,
    quotient_conic_count,
    quotient_identity_check,
    second_moment_brute,
    second_moment_fast,
    smooth_counts,
    threefold_count_brute,
    trace_a,
    _scan,
)
from .field import Field, field_construct, is_prime
from .pencil import (
    Pencil,
    ReductionError,
    classify,
    classify_mod_p,
    delta_polys,
    invariants,
    parse_pencil,
)


def field_for_q(q: int) -> Field:
    for k in (1, 2, 3):
        p = round(q ** (1.0 / k))
        for cand in (p - 1, p, p + 1):
            if cand >= 2 and cand**k == q and is_prime(cand):
                return field_construct(cand, k)
    raise ValueError(f"{q} is not a prime power p^k with k <= 3")


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "coeffs") and not isinstance(obj, (str, bytes)):
        return [_jsonable(c) for c in obj.coeffs]
    return obj


def _emit(payload: dict, as_json: bool) -> None:
    if as_json:
        print(json.dumps(_jsonable(payload), indent=2, sort_keys=True))
        return
    for key, value in payload.items():
        print(f"{key}: {value}")


# -- verify suite -------------------------------------------------------------


def run_verify(pencil: Pencil, qmax: int) -> tuple[dict, bool]:
    """Run every exact identity up to its oracle bound; returns the
    per-identity (pass, fail) tallies."""
    tally: dict[str, list[int]] = {}

    def record(name: str, ok: bool):
        tally.setdefault(name, [0, 0])[0 if ok else 1] += 1

    inv = None
    try:
        inv = invariants(pencil)
        record("resultant-identity", True)
    except AssertionError:
        record("resultant-identity", False)
    if inv is not None:
        record(
            "conic-discriminant",
            inv.conic_discriminant == -16 * inv.mu23 * inv.res_pq,
        )

    qs = []
    for q in range(3, qmax + 1, 2):
        try:
            field_for_q(q)
        except ValueError:
            continue
        qs.append(q)
    for q in qs:
        F = field_for_q(q)
        try:
            sc = _scan(pencil, F)
        except (ReductionError, DegenerateReductionError, ValueError):
            continue
        mt_fast = F.q * (-sc.n_delta + sc.n_c + sc.a_sum**2)
        if q <= THREEFOLD_QMAX_DEFAULT:
            brute_m = threefold_count_brute(pencil, F)
            record("threefold-count", brute_m == q**3 + q**2 + mt_fast)
        if q <= GRID_QMAX_DEFAULT:
            record(
                "moment-fast-vs-brute", second_moment_brute(pencil, F)[1] == mt_fast
            )
            g = grid_counts_brute(pencil, F)
            same = all(
                g[key] == getattr(sc, key)
                for key in (
                    "n_delta", "n_delta_tilde", "n_s", "n_p", "n_p_and_s",
                    "n_c", "n_c_tilde",
                )
            )
            defect = (sc.n_c - sc.n_delta) == (
                sc.n_c_tilde - sc.n_delta_tilde + q - sc.n_s - sc.n_p + sc.n_p_and_s
            )
            record("curve-defect", same and defect)
        if F.k == 1:
            try:
                sm = smooth_counts(pencil, F)
            except (NonTypicalReductionError, ReductionError):
                continue
            record(
                "moment-smooth-identity",
                mt_fast == q * (sm.n_c_bar - sm.n_delta_bar + q - sc.n_s),
            )
            record("quotient-identity", quotient_identity_check(pencil, F))
            record("conic-count", quotient_conic_count(pencil, F) == q + 1)
    for q in (2, 4, 8):
        if q <= qmax:
            F = field_for_q(q)
            record(
                "threefold-count",
                threefold_count_brute(pencil, F) == q**3 + q**2,
            )
    ok = all(fails == 0 for _, fails in tally.values())
    return {name: {"pass": p, "fail": f} for name, (p, f) in tally.items()}, ok


# -- subcommand handlers -------------------------------------------------------


def _cmd_classify(args) -> int:
    pencil = parse_pencil(args.pencil)
    label = classify_mod_p(pencil, args.mod) if args.mod else classify(pencil)
    payload = {
        "pencil": pencil.to_text(),
        "kind": label.kind.value,
        "c1": label.c1,
        "c2": label.c2,
        "c3": label.c3,
        "typical": label.typical,
    }
    if args.mod:
        payload["mod"] = args.mod
    _emit(payload, args.json)
    return 0


def _cmd_invariants(args) -> int:
    pencil = parse_pencil(args.pencil)
    inv = invariants(pencil)
    payload = {
        "pencil": pencil.to_text(),
        "mu01": inv.mu01, "mu02": inv.mu02, "mu03": inv.mu03,
        "mu12": inv.mu12, "mu13": inv.mu13, "mu23": inv.mu23,
        "d": inv.d,
        "res_pq": inv.res_pq,
        "disc_s": inv.disc_s,
        "disc_p": inv.disc_p,
        "disc_q": inv.disc_q,
        "c3_scalar": inv.c3_scalar,
        "t_poly": inv.t_poly,
        "s_tilde": inv.s_tilde,
        "s_poly": inv.s_poly,
        "conic_discriminant": inv.conic_discriminant,
    }
    _emit(payload, args.json)
    return 0


def _cmd_moment(args) -> int:
    pencil = parse_pencil(args.pencil)
    F = field_for_q(args.q)
    bundle = count_bundle(pencil, F, method=args.method)
    payload = {k: v for k, v in asdict(bundle).items() if v is not None}
    _emit(payload, args.json)
    return 0


def _cmd_verify(args) -> int:
    pencil = parse_pencil(args.pencil)
    report, ok = run_verify(pencil, args.qmax)
    if args.json:
        print(json.dumps({"identities": report, "ok": ok}, indent=2, sort_keys=True))
    else:
        for name in sorted(report):
            c = report[name]
            status = "ok" if c["fail"] == 0 else "FAIL"
            print(f"{name}: {c['pass']} pass, {c['fail']} fail [{status}]")
        print("verify:", "ok" if ok else "FAILED")
    return 0 if ok else 2


def _cmd_sweep(args) -> int:
    pencil = parse_pencil(args.pencil)
    rows = sweep(pencil, args.xmax, SweepPolicy(workers=args.workers))
    if args.out == "-":
        for line in sweep_csv_lines(rows):
            print(line)
    else:
        write_sweep_csv(rows, args.out)
        print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_bias(args) -> int:
    pencil = parse_pencil(args.pencil)
    rows = sweep(pencil, args.xmax, SweepPolicy(workers=args.workers))
    try:
        predicted: Optional[int] = predicted_bias(pencil)
    except ValueError:
        predicted = None
    report = averages(rows, pencil=pencil, x=args.xmax)
    payload = {
        "pencil": pencil.to_text(),
        "x": args.xmax,
        "n_included": report.n_included,
        "n_excluded": report.n_excluded,
        "predicted_bias": predicted,
        "avg2": f"{float(report.avg2):.12g}",
        "avg3": f"{report.avg3:.12g}",
        "avgS": f"{float(report.avg_s):.12g}",
        "avg_ainf2": f"{float(report.avg_ainf2):.12g}",
    }
    _emit(payload, args.json)
    return 0


def _cmd_oracle(args) -> int:
    pencil = parse_pencil(args.pencil)
    F = field_for_q(args.q)
    if args.kind != "threefold":
        raise ValueError(f"unknown oracle {args.kind!r}")
    count = threefold_count_brute(pencil, F, qmax=args.qmax)
    _emit({"pencil": pencil.to_text(), "q": args.q, "threefold_points": count}, args.json)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="momentforge",
        description="Exact second-moment sums of cubic pencils over finite fields",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        sp.add_argument("--pencil", required=True, help="pencil spec (text, JSON, or @file)")
        sp.add_argument("--json", action="store_true", help="emit JSON")
        sp.set_defaults(func=handler)
        return sp

    sp = add("classify", _cmd_classify, help="classify a pencil over Q or mod p")
    sp.add_argument("--mod", type=int, default=None, help="classify the reduction at this odd prime")

    add("invariants", _cmd_invariants, help="print the exact scalar invariants")

    sp = add("moment", _cmd_moment, help="second moment at a single prime power")
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--method", choices=("brute", "fast", "smooth"), default="fast")

    sp = add("verify", _cmd_verify, help="run the exact identity suite")
    sp.add_argument("--qmax", type=int, default=THREEFOLD_QMAX_DEFAULT)

    sp = add("sweep", _cmd_sweep, help="stratified prime sweep to CSV")
    sp.add_argument("--xmax", type=int, required=True)
    sp.add_argument("--out", required=True, help="output CSV path, or - for stdout")
    sp.add_argument("--workers", type=int, default=1)

    sp = add("bias", _cmd_bias, help="predicted and empirical bias")
    sp.add_argument("--xmax", type=int, required=True)
    sp.add_argument("--workers", type=int, default=1)

    sp = add("oracle", _cmd_oracle, help="run a brute-force oracle")
    sp.add_argument("kind", choices=("threefold",))
    sp.add_argument("--q", type=int, required=True)
    sp.add_argument("--qmax", type=int, default=None, help="raise the oracle bound")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
