"""Point counts for pencils of cubics over F_q.

Brute-force oracles (fiber traces, second moments, the glued threefold)
sit next to the O(q) fast path (discriminant-curve enumeration with
correction terms, smooth-model counts, the genus-2 trace) and the
zeta-numerator reconstruction with Weil checks.

Every operation is a pure function of (pencil, field); prime-field and
quadratic-extension inputs are routed to vectorized kernels, everything
else runs through the generic field arithmetic. The two paths agree
exactly (tested) and either can be forced.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels
from .field import Field, FieldElement, field_construct, quadratic_character
from .pencil import CaseLabel, Pencil, classify_mod_p, reduce_mod_char

INFINITY = float("inf")

THREEFOLD_QMAX_DEFAULT = 31
GRID_QMAX_DEFAULT = 499
EXT2_KERNEL_QMAX = 1 << 22
_GENERIC_KERNEL_CUTOFF = 3  # kernels used for every prime q >= this


class NonTypicalReductionError(ValueError):
    """smooth-model counting requested at a prime where the reduction is
    not typical; derive the curve defect from the moment identity instead."""


class DegenerateReductionError(ValueError):
    """P and Q became proportional mod p; the discriminant curve is the
    whole plane and none of the curve-side counts are defined."""


class OracleBoundError(ValueError):
    """A brute-force oracle was asked to exceed its configured bound."""


class CountingError(ArithmeticError):
    """An exact identity that must hold failed (upstream counting bug)."""


def _oracle_cap(default: int, qmax: Optional[int]) -> int:
    if qmax is not None:
        return qmax
    env = os.environ.get("MOMENTFORGE_ORACLE_QMAX")
    if env:
        return max(default, int(env))
    return default


@dataclass(frozen=True)
class DeltaSideCounts:
    n_delta: int
    n_delta_tilde: int
    n_s: int
    n_p: int
    n_p_and_s: int


@dataclass(frozen=True)
class SmoothCounts:
    n_delta_bar: int
    n_c_bar: int
    n_c2: int
    d: int


@dataclass(frozen=True)
class CountBundle:
    q: int
    a_inf: int
    m2: int
    m2_tilde: int
    n_delta: int
    n_delta_tilde: int
    n_s: int
    n_p: int
    n_p_and_s: int
    n_c: int
    n_c_tilde: int
    method: str
    case: Optional[str] = None
    n_delta_bar: Optional[int] = None
    n_c_bar: Optional[int] = None
    n_c2: Optional[int] = None
    d: Optional[int] = None

    def __post_init__(self):
        if self.m2_tilde != self.m2 + self.a_inf**2:
            raise CountingError("moment bundle mismatch: Mt2 != M2 + a_inf^2")
        if self.n_delta != self.q + self.n_delta_tilde - self.n_s:
            raise CountingError("bundle mismatch: #Delta != q + #Delta~ - #S")


@dataclass(frozen=True)
class _SmoothScan:
    model: str
    separable: bool
    cover_sum: int
    node_sum: int


@dataclass(frozen=True)
class _AffineScan:
    q: int
    a_inf: int
    a_sum: int
    n_p: int
    n_s: int
    n_p_and_s: int
    n_delta_tilde: int
    n_delta: int
    n_c_tilde: int
    n_c: int
    smooth: Optional[_SmoothScan]


# -- generic field-arithmetic scan -------------------------------------------


def _scan_generic(pencil: Pencil, F: Field) -> _AffineScan:
    if F.p == 2:
        raise ValueError("curve-side counts need odd characteristic")
    q = F.q
    a, b = reduce_mod_char(pencil, F.p)
    chi_t = F.chi_table()
    sqrt_t = F.sqrt_table()
    els = list(F.elements())

    def values(coeffs):
        cf = [F.element(c) for c in coeffs]
        out = []
        for x in els:
            acc = F.zero
            for c in reversed(cf):
                acc = acc * x + c
            out.append(acc)
        return out

    Pv = values(a)
    Qv = values(b)
    chiP = [chi_t[v.index] for v in Pv]
    chiQ = [chi_t[v.index] for v in Qv]
    sum_chi_p = sum(chiP)
    a_inf = -sum_chi_p
    a_sum = sum(cq for cq, pv in zip(chiQ, Pv) if not pv)

    def mu(i, j):
        return a[i] * b[j] - a[j] * b[i]

    mus = mu(0, 1), mu(0, 2), mu(0, 3), mu(1, 2), mu(1, 3), mu(2, 3)
    m01, m02, m03, m12, m13, m23 = mus
    if not any(m % F.p for m in mus):
        raise DegenerateReductionError("pencil is proportional mod p")

    c2v = values((-m03, -m13, -m23))
    c1v = values((-m02, -(m03 + m12), -m13))
    c0v = values((-m01, -m02, -m03))
    Sv = [c2 * x * x + c1 * x + c0 for c2, c1, c0, x in zip(c2v, c1v, c0v, els)]

    n_s = sum(1 for v in Sv if not v)
    n_p = sum(1 for v in Pv if not v)
    n_p_and_s = sum(1 for sv, pv in zip(Sv, Pv) if not sv and not pv)

    # smooth-model selection and weight
    smooth_meta = None
    chiW, sum_chi_w = chiP, sum_chi_p
    weight_same_as_p = True
    if a[3] % F.p or b[3] % F.p:
        model = "p" if a[3] % F.p else "q"
        mc, mv, chi_other = (a, Pv, chiQ) if model == "p" else (b, Qv, chiP)
        gd = _kernels._gcd_mod_p(list(mc), [i * c for i, c in enumerate(mc)][1:], F.p)
        gdeg = len(gd) - 1 if gd else -1
        if gdeg == 0:
            roots = [i for i, v in enumerate(mv) if not v]
            node_sum = sum(
                chi_other[r1] * chi_other[r2] for r1 in roots for r2 in roots if r1 != r2
            )
            smooth_meta = ("cubic", mc, model, True, node_sum)
        elif gdeg == 1:
            dbl = (-gd[0]) % F.p
            simple = (-(mc[2] * pow(mc[3] % F.p, -1, F.p)) - 2 * dbl) % F.p
            if dbl != simple:
                i_dbl = F.element(dbl).index
                i_sim = F.element(simple).index
                node_sum = 2 * chi_other[i_dbl] * chi_other[i_sim]
                smooth_meta = ("linear", simple, model, False, node_sum)
        if smooth_meta is not None:
            kind, data = smooth_meta[0], smooth_meta[1]
            if kind == "cubic" and data is a:
                pass  # weight is P itself
            elif kind == "cubic":
                Wv = values(data)
                chiW = [chi_t[v.index] for v in Wv]
                weight_same_as_p = False
            else:
                bs = F.element(data)
                chiW = [chi_t[(x - bs).index] for x in els]
                weight_same_as_p = False
            sum_chi_w = sum(chiW)

    n_delta_tilde = 0
    n_c_tilde = 0
    cover_sum = 0
    two = F.element(2)
    four = F.element(4)
    for idx, x2 in enumerate(els):
        c2, c1, c0 = c2v[idx], c1v[idx], c0v[idx]
        if c2:
            disc = c1 * c1 - four * c2 * c0
            s = chi_t[disc.index]
            n_delta_tilde += 1 + s
            if s >= 0:
                r = F.from_index(sqrt_t[disc.index])
                inv = F.one / (two * c2)
                roots = [(-c1 + r) * inv]
                if s == 1:
                    roots.append((-c1 - r) * inv)
                for x1 in roots:
                    i1 = x1.index
                    n_c_tilde += 1 + chiP[i1] * chiP[idx]
                    if not weight_same_as_p:
                        cover_sum += 1 + chiW[i1] * chiW[idx]
        elif c1:
            x1 = -c0 / c1
            i1 = x1.index
            n_delta_tilde += 1
            n_c_tilde += 1 + chiP[i1] * chiP[idx]
            if not weight_same_as_p:
                cover_sum += 1 + chiW[i1] * chiW[idx]
        elif not c0:
            n_delta_tilde += q
            n_c_tilde += q + chiP[idx] * sum_chi_p
            if not weight_same_as_p:
                cover_sum += q + chiW[idx] * sum_chi_w

    if weight_same_as_p:
        cover_sum = n_c_tilde

    smooth = None
    if smooth_meta is not None:
        smooth = _SmoothScan(
            model=smooth_meta[2],
            separable=smooth_meta[3],
            cover_sum=cover_sum,
            node_sum=smooth_meta[4],
        )
    n_delta = q + n_delta_tilde - n_s
    n_c = n_c_tilde + (2 * q - n_p) - (2 * n_s - n_p_and_s)
    return _AffineScan(
        q=q,
        a_inf=a_inf,
        a_sum=a_sum,
        n_p=n_p,
        n_s=n_s,
        n_p_and_s=n_p_and_s,
        n_delta_tilde=n_delta_tilde,
        n_delta=n_delta,
        n_c_tilde=n_c_tilde,
        n_c=n_c,
        smooth=smooth,
    )


def _scan_kernel(pencil: Pencil, F: Field) -> _AffineScan:
    a, b = reduce_mod_char(pencil, F.p)
    try:
        if F.k == 1:
            raw = _kernels.scan_prime(a, b, F.p)
        else:
            assert F.k == 2 and F.modulus[1] == 0
            raw = _kernels.scan_ext2(a, b, F.p, (-F.modulus[0]) % F.p)
    except ValueError as exc:
        raise DegenerateReductionError(str(exc)) from exc
    smooth = None
    if raw["smooth"] is not None:
        s = raw["smooth"]
        smooth = _SmoothScan(
            model=s["model"],
            separable=s["separable"],
            cover_sum=s["cover_sum"],
            node_sum=s["node_sum"],
        )
    return _AffineScan(
        q=raw["q"],
        a_inf=raw["a_inf"],
        a_sum=raw["a_sum"],
        n_p=raw["n_p"],
        n_s=raw["n_s"],
        n_p_and_s=raw["n_p_and_s"],
        n_delta_tilde=raw["n_delta_tilde"],
        n_delta=raw["n_delta"],
        n_c_tilde=raw["n_c_tilde"],
        n_c=raw["n_c"],
        smooth=smooth,
    )


@lru_cache(maxsize=2048)
def _scan_cached(pencil: Pencil, p: int, k: int) -> _AffineScan:
    F = field_construct(p, k)
    if F.p == 2:
        raise ValueError("curve-side counts need odd characteristic")
    if F.k == 1 and F.q >= _GENERIC_KERNEL_CUTOFF:
        return _scan_kernel(pencil, F)
    if F.k == 2 and F.q <= EXT2_KERNEL_QMAX:
        return _scan_kernel(pencil, F)
    return _scan_generic(pencil, F)


def _scan(pencil: Pencil, F: Field) -> _AffineScan:
    return _scan_cached(pencil, F.p, F.k)


# -- trace / moment oracles ---------------------------------------------------


def trace_a(pencil: Pencil, F: Field, k) -> int:
    """a_{k,q} = q - #{(x,y) in F_q^2 : y^2 = P(x) k + Q(x)} for finite k,
    and with the fiber y^2 = P(x) for k in {None, inf}."""
    a, b = reduce_mod_char(pencil, F.p)
    at_infinity = k is None or k == INFINITY
    if not at_infinity:
        kel = F.element(k)
    if F.p == 2:
        counts = F.sq_solution_counts()
        total = 0
        for x in F.elements():
            acc = F.zero
            for ca, cb in zip(reversed(a), reversed(b)):
                term = F.element(ca) if at_infinity else F.element(ca) * kel + F.element(cb)
                acc = acc * x + term
            total += counts[acc.index]
        return F.q - total
    if F.k == 1:
        x = np.arange(F.q, dtype=np.int64)
        chi, _ = _kernels.prime_tables(F.q)
        if at_infinity:
            vals = _kernels._horner(a, x, F.q)
        else:
            kv = kel.coeffs[0]
            coeffs = [(ca * kv + cb) % F.q for ca, cb in zip(a, b)]
            vals = _kernels._horner(coeffs, x, F.q)
        return -int(chi[vals].sum())
    chi_t = F.chi_table()
    total = 0
    for x in F.elements():
        acc = F.zero
        for ca, cb in zip(reversed(a), reversed(b)):
            term = F.element(ca) if at_infinity else F.element(ca) * kel + F.element(cb)
            acc = acc * x + term
        total += chi_t[acc.index]
    return -total


def second_moment_brute(
    pencil: Pencil, F: Field, qmax: Optional[int] = None
) -> tuple[int, int]:
    """(M2, Mt2) by the O(q^2) definition: sum over k of a_{k,q}^2."""
    cap = _oracle_cap(GRID_QMAX_DEFAULT, qmax)
    if F.q > cap:
        raise OracleBoundError(f"brute moment at q={F.q} exceeds bound {cap}")
    a, b = reduce_mod_char(pencil, F.p)
    if F.p != 2 and F.k == 1:
        return _kernels.moment_brute_prime(a, b, F.q)
    m2 = 0
    for k in F.elements():
        ak = trace_a(pencil, F, k)
        m2 += ak * ak
    a_inf = trace_a(pencil, F, None)
    return m2, m2 + a_inf * a_inf


def threefold_count_brute(pencil: Pencil, F: Field, qmax: Optional[int] = None) -> int:
    """#M(F_q) by honest enumeration: the affine slices over every k plus
    the slice at infinity, with y-fiber sizes read off a table of squares."""
    cap = _oracle_cap(THREEFOLD_QMAX_DEFAULT, qmax)
    if F.q > cap:
        raise OracleBoundError(f"threefold oracle at q={F.q} exceeds bound {cap}")
    a, b = reduce_mod_char(pencil, F.p)
    if F.p != 2 and F.k == 1:
        return _kernels.threefold_brute_prime(a, b, F.q)
    counts = F.sq_solution_counts()
    els = list(F.elements())

    def values(coeffs):
        cf = [F.element(c) for c in coeffs]
        out = []
        for x in els:
            acc = F.zero
            for c in reversed(cf):
                acc = acc * x + c
            out.append(acc)
        return out

    Pv, Qv = values(a), values(b)
    total = 0
    for k in els:
        fib = [pv * k + qv for pv, qv in zip(Pv, Qv)]
        for v1 in fib:
            for v2 in fib:
                total += counts[(v1 * v2).index]
    for v1 in Pv:
        for v2 in Pv:
            total += counts[(v1 * v2).index]
    return total


def grid_counts_brute(pencil: Pencil, F: Field, qmax: Optional[int] = None) -> dict:
    """O(q^2) oracle for every discriminant-locus count, by grid walk."""
    cap = _oracle_cap(GRID_QMAX_DEFAULT, qmax)
    if F.q > cap:
        raise OracleBoundError(f"grid oracle at q={F.q} exceeds bound {cap}")
    if F.p == 2:
        raise ValueError("grid oracle needs odd characteristic")
    a, b = reduce_mod_char(pencil, F.p)
    if F.k == 1:
        return _kernels.grid_counts_prime(a, b, F.q)
    els = list(F.elements())
    counts = F.sq_solution_counts()

    def poly(coeffs):
        return [F.element(c) for c in coeffs]

    ap, bp = poly(a), poly(b)

    def ev(cf, x):
        acc = F.zero
        for c in reversed(cf):
            acc = acc * x + c
        return acc

    Pv = {x.index: ev(ap, x) for x in els}
    Qv = {x.index: ev(bp, x) for x in els}
    out = dict.fromkeys(
        ("n_delta", "n_delta_tilde", "n_s", "n_p", "n_p_and_s", "n_c", "n_c_tilde"), 0
    )
    for x1 in els:
        if not Pv[x1.index]:
            out["n_p"] += 1
        for x2 in els:
            delta = Pv[x1.index] * Qv[x2.index] - Pv[x2.index] * Qv[x1.index]
            diff = x1 - x2
            lift = counts[(Pv[x1.index] * Pv[x2.index]).index]
            if not delta:
                out["n_delta"] += 1
                out["n_c"] += lift
            if diff:
                if not delta:
                    out["n_delta_tilde"] += 1
                    out["n_c_tilde"] += lift
            else:
                # diagonal: Delta~ vanishes iff the diagonal polynomial does
                dt = _delta_tilde_at(pencil, F, x1, x2)
                if not dt:
                    out["n_s"] += 1
                    out["n_delta_tilde"] += 1
                    out["n_c_tilde"] += lift
                    if not Pv[x1.index]:
                        out["n_p_and_s"] += 1
    return out


def _delta_tilde_at(pencil: Pencil, F: Field, x1: FieldElement, x2: FieldElement):
    a, b = reduce_mod_char(pencil, F.p)

    def mu(i, j):
        return F.element(a[i] * b[j] - a[j] * b[i])

    m01, m02, m03, m12, m13, m23 = (
        mu(0, 1), mu(0, 2), mu(0, 3), mu(1, 2), mu(1, 3), mu(2, 3)
    )
    c2 = -(m03 + m13 * x2 + m23 * x2 * x2)
    c1 = -m02 - (m03 + m12) * x2 - m13 * x2 * x2
    c0 = -(m01 + m02 * x2 + m03 * x2 * x2)
    return c2 * x1 * x1 + c1 * x1 + c0


# -- fast path ----------------------------------------------------------------


def count_delta_side(pencil: Pencil, F: Field) -> DeltaSideCounts:
    """(#Delta, #Delta~, #S, #P, #(P cap S)) in O(q)."""
    sc = _scan(pencil, F)
    return DeltaSideCounts(sc.n_delta, sc.n_delta_tilde, sc.n_s, sc.n_p, sc.n_p_and_s)


def count_C_side(pencil: Pencil, F: Field) -> tuple[int, int]:
    """(#C, #C~): the double covers of the discriminant locus and of its
    reduced part inside y^2 = P(x1) P(x2)."""
    sc = _scan(pencil, F)
    return sc.n_c, sc.n_c_tilde


def second_moment_fast(pencil: Pencil, F: Field) -> int:
    """Mt2 = q (-#Delta + #C + [sum_{P(x)=0} chi(Q(x))]^2) in O(q)."""
    sc = _scan(pencil, F)
    return F.q * (-sc.n_delta + sc.n_c + sc.a_sum**2)


def curve_defect_from_moment(pencil: Pencil, F: Field, m2_tilde: int) -> int:
    """#Cbar - #Dbar recovered from the moment identity
    Mt2/q = #Cbar - #Dbar + q - #S; the fallback route when the smooth
    model is unavailable at this prime."""
    sc = _scan(pencil, F)
    value = Fraction(m2_tilde, F.q) - F.q + sc.n_s
    if value.denominator != 1:
        raise CountingError("moment not divisible by q")
    return int(value)


def _smooth_from_scan(pencil: Pencil, F: Field, sc: _AffineScan) -> SmoothCounts:
    if sc.smooth is None:
        raise NonTypicalReductionError(
            f"no usable smooth model at p={F.p} (degenerate cubic side)"
        )
    a, b = reduce_mod_char(pencil, F.p)

    def mu(i, j):
        return (a[i] * b[j] - a[j] * b[i]) % F.p

    d_int = (mu(1, 3) ** 2 - 4 * mu(0, 3) * mu(2, 3)) % F.p
    if d_int == 0:
        raise NonTypicalReductionError("tangent-cone constant vanishes mod p")
    if F.k % 2 == 0:
        chi_d = 1  # every element of F_p is a square in F_{p^2}
    else:
        chi_d = 1 if pow(d_int, (F.p - 1) // 2, F.p) == 1 else -1
    inf_term = 2 * (1 + chi_d)
    n_delta_bar = sc.n_delta_tilde + inf_term
    n_c_bar = sc.smooth.cover_sum + sc.smooth.node_sum + inf_term
    n_c2 = n_c_bar - n_delta_bar + F.q + 1
    return SmoothCounts(n_delta_bar, n_c_bar, n_c2, (F.q + 1) - n_c2)


def smooth_counts(pencil: Pencil, F: Field) -> SmoothCounts:
    """(#Dbar, #Cbar, #C2, d) for a typical reduction.

    #Dbar corrects #Delta~ by the two nodes at infinity, each worth
    1 + chi(d) rational points; #Cbar corrects the model cover sum by the
    rational affine nodes (worth chi of the co-polynomial product each)
    and the four points over infinity. The infinity corrections cancel in
    #Cbar - #Dbar, so d is independent of chi(d).
    """
    label = classify_mod_p(pencil, F.p)
    if not label.typical:
        raise NonTypicalReductionError(
            f"reduction at p={F.p} is {label.kind.value}, not typical"
        )
    return _smooth_from_scan(pencil, F, _scan(pencil, F))


def quotient_conic_count(pencil: Pencil, F: Field) -> int:
    """Projective point count of the quotient conic; q + 1 at every
    typical reduction."""
    label = classify_mod_p(pencil, F.p)
    if not label.typical:
        raise NonTypicalReductionError(
            f"reduction at p={F.p} is {label.kind.value}, not typical"
        )
    a, b = reduce_mod_char(pencil, F.p)

    def mu(i, j):
        return (a[i] * b[j] - a[j] * b[i]) % F.p

    m01, m02, m03, m12, m13, m23 = (
        mu(0, 1), mu(0, 2), mu(0, 3), mu(1, 2), mu(1, 3), mu(2, 3)
    )
    coeffs = (-m03, -m23, -m13, -m02, m03 - m12, -m01)
    if F.k == 1:
        return _kernels.conic_count_prime(tuple(c % F.p for c in coeffs), F.q)
    A11, A22, A12, B1, B2, C = (F.element(c) for c in coeffs)
    chi_t = F.chi_table()
    total = 0
    four = F.element(4)
    for s1 in F.elements():
        qb = A12 * s1 + B2
        qc = A11 * s1 * s1 + B1 * s1 + C
        if A22:
            disc = qb * qb - four * A22 * qc
            total += 1 + chi_t[disc.index]
        elif qb:
            total += 1
        elif not qc:
            total += F.q
    if not A11 and not A22 and not A12:
        total += F.q + 1
    else:
        if not A11:
            total += 1
        if A11:
            disc = A12 * A12 - four * A11 * A22
            total += 1 + chi_t[disc.index]
        elif A12:
            total += 1
    return total


def quotient_identity_check(pencil: Pencil, F: Field) -> bool:
    """#Cbar + 2 #C4 = #C1 + #C2 + #C3 with #C1 = #Dbar, #C3 = #C4 = q+1
    and the conic actually counted."""
    sm = smooth_counts(pencil, F)
    n_c4 = quotient_conic_count(pencil, F)
    if n_c4 != F.q + 1:
        return False
    return sm.n_c_bar + 2 * n_c4 == sm.n_delta_bar + sm.n_c2 + (F.q + 1)


def count_bundle(pencil: Pencil, F: Field, method: str = "fast") -> CountBundle:
    """Assemble the per-(pencil, q) count record by the requested route."""
    label: Optional[CaseLabel]
    try:
        label = classify_mod_p(pencil, F.p) if F.p != 2 else None
    except ValueError:
        label = None
    case = label.kind.value if label is not None else None
    if method == "brute":
        m2, mt2 = second_moment_brute(pencil, F)
        g = grid_counts_brute(pencil, F)
        a_inf = trace_a(pencil, F, None)
        return CountBundle(
            q=F.q, a_inf=a_inf, m2=m2, m2_tilde=mt2, method="brute", case=case, **g
        )
    sc = _scan(pencil, F)
    mt2 = F.q * (-sc.n_delta + sc.n_c + sc.a_sum**2)
    base = dict(
        q=F.q,
        a_inf=sc.a_inf,
        m2=mt2 - sc.a_inf**2,
        m2_tilde=mt2,
        n_delta=sc.n_delta,
        n_delta_tilde=sc.n_delta_tilde,
        n_s=sc.n_s,
        n_p=sc.n_p,
        n_p_and_s=sc.n_p_and_s,
        n_c=sc.n_c,
        n_c_tilde=sc.n_c_tilde,
        case=case,
    )
    if method == "fast":
        return CountBundle(method="fast", **base)
    if method != "smooth":
        raise ValueError(f"unknown method {method!r}")
    sm = smooth_counts(pencil, F)
    return CountBundle(
        method="smooth",
        n_delta_bar=sm.n_delta_bar,
        n_c_bar=sm.n_c_bar,
        n_c2=sm.n_c2,
        d=sm.d,
        **base,
    )


# -- L-polynomials ------------------------------------------------------------


def _ge_zero_sqrt(a: int, b: int, p: int) -> bool:
    """Exact test for a + b sqrt(p) >= 0 with integer a, b and prime p."""
    if a >= 0 and b >= 0:
        return True
    if a <= 0 and b <= 0:
        return a == 0 and b == 0
    if b > 0:  # a < 0
        return b * b * p >= a * a
    return a * a >= b * b * p  # a > 0, b < 0


@dataclass(frozen=True)
class LPolynomial:
    """Numerator of the zeta function of a smooth curve: integer
    coefficients c_0..c_{2g} with c_0 = 1 and the functional-equation
    symmetry c_{2g-i} = p^{g-i} c_i."""

    genus: int
    p: int
    coeffs: tuple[int, ...]

    def power_sum(self, n: int) -> int:
        """Sum of the n-th powers of the inverse roots."""
        g2 = 2 * self.genus
        s: list[int] = []
        for m in range(1, n + 1):
            acc = -m * self.coeffs[m] if m <= g2 else 0
            for i in range(1, min(m, g2) + 1):
                if m - i >= 1:
                    acc -= self.coeffs[i] * s[m - i - 1]
            s.append(acc)
        return s[n - 1]

    def predicted_count(self, n: int) -> int:
        return self.p**n + 1 - self.power_sum(n)

    def inverse_root_moduli(self) -> list[float]:
        rec = list(self.coeffs)  # roots of sum c_i x^{2g-i} are the alpha_i
        roots = np.roots(rec)
        return sorted(abs(complex(r)) for r in roots)

    def real_weil_poly(self) -> tuple[int, ...]:
        """Monic integer polynomial (constant first) whose roots are the
        pair sums alpha + p/alpha."""
        p, c = self.p, self.coeffs
        if self.genus == 1:
            return (c[1], 1)
        if self.genus == 2:
            return (c[2] - 2 * p, c[1], 1)
        return (c[3] - 2 * p * c[1], c[2] - 3 * p, c[1], 1)

    def weil_check(self, tol: float = 1e-9) -> bool:
        """True iff every inverse root has modulus exactly sqrt(p).

        Decided in exact integer arithmetic through the real Weil
        polynomial: all its roots must be real and lie in
        [-2 sqrt(p), 2 sqrt(p)], which makes each modulus exactly sqrt(p)
        (so certainly within any numeric tolerance). Floating-point root
        extraction is avoided because repeated inverse roots, which do
        occur, are ill-conditioned beyond 1e-9.
        """
        p = self.p
        h = self.real_weil_poly()
        if self.genus == 1:
            return h[0] ** 2 <= 4 * p
        if self.genus == 2:
            v, u = h[0], h[1]
            return (
                u * u - 4 * v >= 0
                and u * u <= 16 * p
                and _ge_zero_sqrt(4 * p + v, 2 * u, p)
                and _ge_zero_sqrt(4 * p + v, -2 * u, p)
            )
        w, v, u = h[0], h[1], h[2]
        disc = 18 * u * v * w - 4 * u**3 * w + u * u * v * v - 4 * v**3 - 27 * w * w
        if disc < 0:
            return False
        # all roots <= 2 sqrt(p): h, h', h'' nonnegative there; mirrored below
        upper = (
            _ge_zero_sqrt(4 * p * u + w, 8 * p + 2 * v, p)
            and _ge_zero_sqrt(12 * p + v, 4 * u, p)
            and _ge_zero_sqrt(2 * u, 12, p)
        )
        lower = (
            _ge_zero_sqrt(-(4 * p * u + w), 8 * p + 2 * v, p)
            and _ge_zero_sqrt(12 * p + v, -4 * u, p)
            and _ge_zero_sqrt(-2 * u, 12, p)
        )
        return upper and lower


def reconstruct_L(
    counts: Sequence[int], p: int, genus: Optional[int] = None
) -> LPolynomial:
    """Rebuild the degree-2g zeta numerator from point counts over
    F_p, F_{p^2}, ..., F_{p^g} via Newton's identities plus the functional
    equation; validates integrality and the root-modulus bound. Counts
    beyond the g-th are redundant and are checked against the values the
    functional equation forces."""
    g = len(counts) if genus is None else genus
    if len(counts) < g:
        raise ValueError(f"need {g} counts, got {len(counts)}")
    if not 1 <= g <= 3:
        raise ValueError("genus must be between 1 and 3")
    s = [p**n + 1 - counts[n - 1] for n in range(1, g + 1)]
    c: list[Fraction] = [Fraction(1)]
    for n in range(1, g + 1):
        acc = Fraction(0)
        for i in range(1, n + 1):
            acc += s[i - 1] * c[n - i]
        cn = -acc / n
        if cn.denominator != 1:
            raise CountingError(
                f"non-integral zeta-numerator coefficient c_{n} = {cn}"
            )
        c.append(cn)
    coeffs = [int(v) for v in c]
    for i in range(g - 1, -1, -1):
        coeffs.append(p ** (g - i) * coeffs[i])
    L = LPolynomial(genus=g, p=p, coeffs=tuple(coeffs))
    if not L.weil_check():
        raise CountingError(
            f"reconstructed polynomial violates the root-modulus bound: {coeffs}"
        )
    for n in range(g + 1, len(counts) + 1):
        if counts[n - 1] != L.predicted_count(n):
            raise CountingError(
                f"count over degree-{n} extension disagrees with the "
                f"reconstruction: {counts[n - 1]} != {L.predicted_count(n)}"
            )
    return L
