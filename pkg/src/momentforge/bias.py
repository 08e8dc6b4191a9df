"""Per-prime stratification of the second moment and the prime-sweep engine.

For a typical reduction the moment splits exactly as
M2 = f4 + f3 + f2 with f4 = p^2, f3 = -p d_p, f2 = -p #S(F_p) - a_inf^2;
the running averages of the lower-order terms measure the empirical bias,
predicted to be -(number of irreducible factors of S) - (1 if the fiber
at infinity is elliptic).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from typing import Iterable, Iterator, Optional, Sequence, Union

from .counting import (
    DegenerateReductionError,
    CountingError,
    second_moment_fast,
    smooth_counts,
    _scan,
    _smooth_from_scan,
)
from .field import Field, field_construct, primes_up_to
from .pencil import (
    Pencil,
    ReductionError,
    classify,
    classify_mod_p,
    delta_infinity_flag,
)
from .polyalg import (
    UniPoly,
    count_distinct_roots,
    discriminant,
    rational_irreducible_factor_count,
    _to_primitive_int,
)

SWEEP_XMAX_LIMIT = 10**6

CSV_HEADER = (
    "p,case,excluded,M2,Mtilde2,a_inf,d_p,N_S,f4,f3,f2,"
    "avg3_running,avg2_running,avgS_running"
)


@dataclass(frozen=True)
class SweepRow:
    p: int
    case: Optional[str]
    excluded: bool
    reason: Optional[str]
    m2: Optional[int]
    m2_tilde: Optional[int]
    a_inf: Optional[int]
    d_p: Optional[int]
    n_s: Optional[int]
    f4: Optional[int]
    f3: Optional[int]
    f2: Optional[int]


@dataclass(frozen=True)
class BiasReport:
    x: Optional[int]
    n_included: int
    n_excluded: int
    excluded_primes: tuple[int, ...]
    avg3: float
    avg2: Fraction
    avg_s: Fraction
    avg_ainf2: Fraction
    predicted: Optional[int]


@dataclass(frozen=True)
class SweepPolicy:
    workers: int = 1
    xmax_limit: int = SWEEP_XMAX_LIMIT


def stratify(pencil: Pencil, F: Union[Field, int]) -> SweepRow:
    """One sweep row at an odd prime: exact moment, stratified terms, and
    the exclusion flag for non-typical reductions.

    Excluded rows still record the exact moment when the discriminant
    curve is nondegenerate mod p (it is cheap); the f_i terms exist only
    on typical rows, where M2 = f4 + f3 + f2 is asserted exactly.
    """
    p = F.p if isinstance(F, Field) else int(F)
    if p == 2:
        raise ValueError("stratification is defined at odd primes only")
    Fp = field_construct(p, 1)
    try:
        label = classify_mod_p(pencil, p)
    except ReductionError as exc:
        return SweepRow(
            p=p, case=None, excluded=True, reason=str(exc),
            m2=None, m2_tilde=None, a_inf=None, d_p=None, n_s=None,
            f4=None, f3=None, f2=None,
        )
    try:
        sc = _scan(pencil, Fp)
    except DegenerateReductionError as exc:
        return SweepRow(
            p=p, case=label.kind.value, excluded=True, reason=str(exc),
            m2=None, m2_tilde=None, a_inf=None, d_p=None, n_s=None,
            f4=None, f3=None, f2=None,
        )
    mt2 = p * (-sc.n_delta + sc.n_c + sc.a_sum**2)
    m2 = mt2 - sc.a_inf**2
    if not label.typical:
        return SweepRow(
            p=p, case=label.kind.value, excluded=True, reason=label.kind.value,
            m2=m2, m2_tilde=mt2, a_inf=sc.a_inf, d_p=None, n_s=sc.n_s,
            f4=None, f3=None, f2=None,
        )
    sm = _smooth_from_scan(pencil, Fp, sc)
    f4 = p * p
    f3 = -p * sm.d
    f2 = -p * sc.n_s - sc.a_inf**2
    if m2 != f4 + f3 + f2:
        raise CountingError(
            f"stratification identity failed at p={p}: "
            f"M2={m2} but f4+f3+f2={f4 + f3 + f2}"
        )
    return SweepRow(
        p=p, case=label.kind.value, excluded=False, reason=None,
        m2=m2, m2_tilde=mt2, a_inf=sc.a_inf, d_p=sm.d, n_s=sc.n_s,
        f4=f4, f3=f3, f2=f2,
    )


def _sweep_chunk(pencil: Pencil, primes: Sequence[int]) -> list[SweepRow]:
    return [stratify(pencil, p) for p in primes]


def sweep(
    pencil: Pencil, x: int, policy: Optional[SweepPolicy] = None
) -> list[SweepRow]:
    """Rows for every odd prime p <= x in ascending order; output is a pure
    function of (pencil, x) regardless of the worker count."""
    policy = policy or SweepPolicy()
    if x > policy.xmax_limit:
        raise ValueError(f"sweep bound {x} exceeds configured limit {policy.xmax_limit}")
    if not any(pencil.mu(i, j) for i in range(4) for j in range(i + 1, 4)):
        raise ValueError("proportional pencil: the sweep is undefined")
    primes = [p for p in primes_up_to(x) if p != 2]
    if policy.workers <= 1 or len(primes) < 32:
        rows = _sweep_chunk(pencil, primes)
    else:
        nchunks = policy.workers * 8
        chunks = [primes[i::nchunks] for i in range(nchunks)]
        rows = []
        with ProcessPoolExecutor(max_workers=policy.workers) as pool:
            for part in pool.map(partial(_sweep_chunk, pencil), chunks):
                rows.extend(part)
    rows.sort(key=lambda r: r.p)
    return rows


def averages(
    rows: Iterable[SweepRow],
    pencil: Optional[Pencil] = None,
    x: Optional[int] = None,
) -> BiasReport:
    """Arithmetic means over the included primes. avg2, avgS and the
    a_inf^2 term accumulate as exact rationals (and satisfy
    avg2 + avgS + avg_ainf2 = 0 exactly); avg3 involves sqrt(p) and is
    accumulated in ascending-p order as a float."""
    rows = list(rows)
    included = [r for r in rows if not r.excluded]
    if not included:
        raise ValueError("no included rows to average")
    n = len(included)
    sum3 = 0.0
    sum2 = Fraction(0)
    sum_s = Fraction(0)
    sum_a2 = Fraction(0)
    for r in included:
        sum3 += r.f3 / (r.p * math.sqrt(r.p))
        sum2 += Fraction(r.f2, r.p)
        sum_s += r.n_s
        sum_a2 += Fraction(r.a_inf**2, r.p)
    avg2 = sum2 / n
    avg_s = sum_s / n
    avg_a2 = sum_a2 / n
    if avg2 + avg_s + avg_a2 != 0:
        raise CountingError("exact identity avg2 + avgS + avg_ainf2 = 0 failed")
    predicted = None
    if pencil is not None:
        try:
            predicted = predicted_bias(pencil)
        except ValueError:
            predicted = None
    return BiasReport(
        x=x,
        n_included=n,
        n_excluded=len(rows) - n,
        excluded_primes=tuple(r.p for r in rows if r.excluded),
        avg3=sum3 / n,
        avg2=avg2,
        avg_s=avg_s,
        avg_ainf2=avg_a2,
        predicted=predicted,
    )


def predicted_bias(pencil: Pencil) -> int:
    """-m - delta for a pencil that is typical over Q: m counts the
    distinct irreducible factors of the diagonal quartic S, delta is 1
    exactly when the fiber at infinity is a smooth cubic."""
    label = classify(pencil)
    if not label.typical:
        raise ValueError(
            f"bias prediction needs a typical pencil; classification is {label.kind.value}"
        )
    from .pencil import delta_polys

    s_poly = delta_polys(pencil)[2]
    m = rational_irreducible_factor_count(s_poly)
    return -m - delta_infinity_flag(pencil)


def chebotarev_average(f: UniPoly, x: int) -> Fraction:
    """Mean of the number of distinct roots of f mod p over odd primes
    p <= x not dividing lc(f) disc(f); tends to the number of distinct
    irreducible factors of f over Q."""
    if not f or f.degree < 1:
        raise ValueError("average of root counts needs a nonconstant polynomial")
    ints = _to_primitive_int(f)
    fi = UniPoly([Fraction(c) for c in ints])
    bad = abs(ints[-1])
    disc = discriminant(fi)
    if disc:
        bad *= abs(disc.numerator)
    total = Fraction(0)
    n = 0
    for p in primes_up_to(x):
        if p == 2 or bad % p == 0:
            continue
        total += count_distinct_roots(fi, field_construct(p, 1))
        n += 1
    if n == 0:
        raise ValueError("no admissible primes below the bound")
    return total / n


# -- CSV emission -------------------------------------------------------------


def _fmt12(value) -> str:
    return f"{float(value):.12g}"


def sweep_csv_lines(rows: Sequence[SweepRow]) -> Iterator[str]:
    """CSV rows with running averages, integers verbatim; blank cells for
    quantities that do not exist on excluded rows."""
    yield CSV_HEADER
    n = 0
    sum3 = 0.0
    sum2 = Fraction(0)
    sum_s = Fraction(0)
    for r in rows:
        if not r.excluded:
            n += 1
            sum3 += r.f3 / (r.p * math.sqrt(r.p))
            sum2 += Fraction(r.f2, r.p)
            sum_s += r.n_s

        def cell(v):
            return "" if v is None else str(v)

        running = (
            [_fmt12(sum3 / n), _fmt12(sum2 / n), _fmt12(sum_s / n)]
            if n
            else ["", "", ""]
        )
        yield ",".join(
            [
                str(r.p),
                r.case or "reduction_error",
                "1" if r.excluded else "0",
                cell(r.m2),
                cell(r.m2_tilde),
                cell(r.a_inf),
                cell(r.d_p),
                cell(r.n_s),
                cell(r.f4),
                cell(r.f3),
                cell(r.f2),
            ]
            + running
        )


def write_sweep_csv(rows: Sequence[SweepRow], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in sweep_csv_lines(rows):
            fh.write(line + "\n")
