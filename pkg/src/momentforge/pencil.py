"""Pencils y^2 = P(x) k + Q(x) and their derived invariants.

A pencil is the pair of rational coefficient vectors of P and Q (degree
<= 3). This module computes the 2x2 minors and every scalar the
genericity classification needs, builds the discriminant curve
polynomials, and classifies a pencil over Q or modulo a prime.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Sequence, Union

from .field import Field, FieldElement
from .polyalg import BiPoly, UniPoly, discriminant, divide_exact_bivariate, poly_gcd, resultant


class DegreeTwoCommonFactorError(ValueError):
    """P and Q share a quadratic factor: every fiber is a singular cubic,
    so such pencils are rejected outright."""


class ReductionError(ValueError):
    """The pencil cannot be reduced at this prime (a denominator vanishes
    or one of P, Q reduces to the zero polynomial)."""


class CaseKind(str, Enum):
    PROPORTIONAL = "proportional"
    COMMON_FACTOR_DEG1 = "common_factor_deg1"
    COMMON_FACTOR_DEG2 = "common_factor_deg2"  # reachable mod p only
    COMMON_FACTOR_DEG3 = "common_factor_deg3"
    CASE1 = "case1"
    CASE2 = "case2"
    CASE3 = "case3"
    CASE4 = "case4"
    CASE5 = "case5"
    CASE6 = "case6"
    CASE7 = "case7"
    CASE8 = "case8"


_CASE_BY_FLAGS = {
    (False, False, False): CaseKind.CASE1,
    (False, False, True): CaseKind.CASE2,
    (False, True, False): CaseKind.CASE3,
    (False, True, True): CaseKind.CASE4,
    (True, False, False): CaseKind.CASE5,
    (True, False, True): CaseKind.CASE6,
    (True, True, False): CaseKind.CASE7,
    (True, True, True): CaseKind.CASE8,
}


@dataclass(frozen=True)
class CaseLabel:
    kind: CaseKind
    c1: bool  # mu_23 = 0
    c2: bool  # d = 0
    c3: bool  # the cubic minor combination vanishes
    typical: bool

    def __str__(self):
        return self.kind.value


@dataclass(frozen=True)
class Pencil:
    """Coefficients a = (a0..a3) of P and b = (b0..b3) of Q, constant first."""

    a: tuple[Fraction, Fraction, Fraction, Fraction]
    b: tuple[Fraction, Fraction, Fraction, Fraction]

    def __post_init__(self):
        a = tuple(Fraction(c) for c in self.a)
        b = tuple(Fraction(c) for c in self.b)
        if len(a) != 4 or len(b) != 4:
            raise ValueError("a pencil needs exactly 4 coefficients per polynomial")
        if not any(a):
            raise ValueError("P is identically zero")
        if not any(b):
            raise ValueError("Q is identically zero")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def P(self) -> UniPoly:
        return UniPoly(self.a)

    @property
    def Q(self) -> UniPoly:
        return UniPoly(self.b)

    def mu(self, i: int, j: int) -> Fraction:
        return self.a[i] * self.b[j] - self.a[j] * self.b[i]

    # -- external text / JSON forms -----------------------------------------

    @staticmethod
    def from_text(spec: str) -> "Pencil":
        """Parse `P=a3,a2,a1,a0;Q=b3,b2,b1,b0`, entries int or num/den."""
        parts = spec.replace(" ", "").split(";")
        if len(parts) != 2:
            raise ValueError(f"malformed pencil spec {spec!r}")
        coeffs = {}
        for part in parts:
            if "=" not in part:
                raise ValueError(f"malformed pencil spec {spec!r}")
            name, _, rest = part.partition("=")
            entries = rest.split(",")
            if name not in ("P", "Q") or len(entries) != 4:
                raise ValueError(f"malformed pencil spec {spec!r}")
            coeffs[name] = tuple(Fraction(e) for e in reversed(entries))
        if set(coeffs) != {"P", "Q"}:
            raise ValueError(f"malformed pencil spec {spec!r}")
        return Pencil(coeffs["P"], coeffs["Q"])

    def to_text(self) -> str:
        fmt = lambda cs: ",".join(str(c) for c in reversed(cs))
        return f"P={fmt(self.a)};Q={fmt(self.b)}"

    @staticmethod
    def from_json_obj(obj: dict) -> "Pencil":
        a = tuple(Fraction(s) for s in reversed(obj["a"]))
        b = tuple(Fraction(s) for s in reversed(obj["b"]))
        return Pencil(a, b)

    def to_json_obj(self) -> dict:
        return {
            "a": [str(c) for c in reversed(self.a)],
            "b": [str(c) for c in reversed(self.b)],
        }

    def __str__(self):
        return self.to_text()


def parse_pencil(spec: str) -> Pencil:
    """Accept the inline text form, inline JSON, or `@path` to a JSON file."""
    spec = spec.strip()
    if spec.startswith("@"):
        with open(spec[1:], "r", encoding="utf-8") as fh:
            return Pencil.from_json_obj(json.load(fh))
    if spec.startswith("{"):
        return Pencil.from_json_obj(json.loads(spec))
    return Pencil.from_text(spec)


@dataclass(frozen=True)
class ConicModel:
    """The quotient conic in the symmetric coordinates s1 = x1 + x2,
    s2 = x1 x2 (the image of the discriminant curve)."""

    s1s1: Fraction
    s2s2: Fraction
    s1s2: Fraction
    s1: Fraction
    s2: Fraction
    const: Fraction

    def coeff_tuple(self):
        return (self.s1s1, self.s2s2, self.s1s2, self.s1, self.s2, self.const)


@dataclass(frozen=True)
class PencilInvariants:
    mu01: Fraction
    mu02: Fraction
    mu03: Fraction
    mu12: Fraction
    mu13: Fraction
    mu23: Fraction
    d: Fraction
    res_pq: Fraction  # formal degree-(3,3) resultant of (P, Q)
    t_poly: UniPoly
    s_tilde: UniPoly
    s_poly: UniPoly
    disc_s: Fraction
    disc_p: Fraction
    disc_q: Fraction
    c3_scalar: Fraction
    conic: ConicModel
    conic_discriminant: Fraction


def _mu_six(a, b):
    def mu(i, j):
        return a[i] * b[j] - a[j] * b[i]

    return mu(0, 1), mu(0, 2), mu(0, 3), mu(1, 2), mu(1, 3), mu(2, 3)


def _res_pq_from_minors(m01, m02, m03, m12, m13, m23):
    return -(m03**3) + m12 * m03**2 - m01 * m13**2 + (m01 * (3 * m03 + m12) - m02**2) * m23


def _c3_scalar(m01, m02, m03, m12, m13, m23):
    return (
        m12**3
        + 27 * m01 * m13**2
        + 27 * (m02**2 - m01 * m12) * m23
        - 9 * m03 * (m12**2 + 9 * m01 * m23)
    )


def s_poly_from_minors(m01, m02, m03, m12, m13, m23) -> UniPoly:
    """The diagonal restriction of the reduced discriminant curve, in its
    closed quartic form."""
    return UniPoly([-m01, -2 * m02, -(m12 + 3 * m03), -2 * m13, -m23])


def _s_tilde(m01, m02, m03, m12, m13, m23) -> UniPoly:
    s0 = (2 * m03 - m12) * m03**2 + (m02**2 - 3 * m01 * m03) * m23
    s1 = 3 * m13 * m03**2 - m01 * m13 * m23 - 2 * m02 * (m13**2 - m12 * m23)
    s2 = -m12 * m13**2 - 4 * m01 * m23**2 + (3 * m03**2 + m12**2 + m02 * m13) * m23
    s3 = -(m13**3) + m23 * (m12 + 3 * m03) * m13 - 2 * m02 * m23**2
    return UniPoly([s0, s1, s2, s3])


def conic_model(m01, m02, m03, m12, m13, m23) -> ConicModel:
    return ConicModel(
        s1s1=-m03, s2s2=-m23, s1s2=-m13, s1=-m02, s2=m03 - m12, const=-m01
    )


def conic_discriminant_of(model: ConicModel) -> Fraction:
    """Iterated discriminant: first in s2, then in s1 (formal degree 2)."""
    # quadratic in s2: A s2^2 + (s1s2*s1 + s2) s2 + (s1s1*s1^2 + s1*s1 + const)
    A = model.s2s2
    b1, b0 = model.s1s2, model.s2
    c2, c1, c0 = model.s1s1, model.s1, model.const
    # D2(s1) = (b1 s1 + b0)^2 - 4 A (c2 s1^2 + c1 s1 + c0)
    d2a = b1 * b1 - 4 * A * c2
    d2b = 2 * b1 * b0 - 4 * A * c1
    d2c = b0 * b0 - 4 * A * c0
    return d2b * d2b - 4 * d2a * d2c


def invariants(pencil: Pencil) -> PencilInvariants:
    """All scalar invariants, computed exactly over Q.

    Cross-checks performed on every call: the closed quartic form of S
    against the diagonal of the reduced discriminant curve, the printed
    minor expression for Res(P, Q) against the Sylvester determinant, and
    (when mu23 != 0) the resultant identity
    Res(S~, T) = -mu23^3 Res(P, Q)^2.
    """
    m01, m02, m03, m12, m13, m23 = _mu_six(pencil.a, pencil.b)
    d = m13 * m13 - 4 * m03 * m23
    res_pq = _res_pq_from_minors(m01, m02, m03, m12, m13, m23)
    sylvester = resultant(pencil.P, pencil.Q, deg_f=3, deg_g=3)
    if res_pq != sylvester:
        raise AssertionError("minor expression for Res(P,Q) disagrees with Sylvester")
    t_poly = UniPoly([-m03, -m13, -m23])
    s_tilde = _s_tilde(m01, m02, m03, m12, m13, m23)
    s_poly = s_poly_from_minors(m01, m02, m03, m12, m13, m23)
    _, delta_tilde, s_diag = delta_polys(pencil)
    if s_diag != s_poly:
        raise AssertionError("closed quartic form of S disagrees with the diagonal")
    if m23:
        lhs = resultant(s_tilde, t_poly, deg_f=3, deg_g=2)
        if lhs != -(m23**3) * res_pq**2:
            raise AssertionError("resultant identity Res(S~,T) = -mu23^3 Res(P,Q)^2 failed")
    zero = Fraction(0)
    disc_s = discriminant(s_poly) if s_poly.degree >= 1 else zero
    disc_p = discriminant(pencil.P) if pencil.P.degree >= 1 else zero
    disc_q = discriminant(pencil.Q) if pencil.Q.degree >= 1 else zero
    model = conic_model(m01, m02, m03, m12, m13, m23)
    return PencilInvariants(
        mu01=m01,
        mu02=m02,
        mu03=m03,
        mu12=m12,
        mu13=m13,
        mu23=m23,
        d=d,
        res_pq=res_pq,
        t_poly=t_poly,
        s_tilde=s_tilde,
        s_poly=s_poly,
        disc_s=disc_s,
        disc_p=disc_p,
        disc_q=disc_q,
        c3_scalar=_c3_scalar(m01, m02, m03, m12, m13, m23),
        conic=model,
        conic_discriminant=conic_discriminant_of(model),
    )


def delta_polys(pencil: Pencil) -> tuple[BiPoly, BiPoly, UniPoly]:
    """(Delta, Delta~, S): the discriminant surface polynomial
    Delta(x1,x2) = P(x1)Q(x2) - P(x2)Q(x1), its exact quotient by
    (x1 - x2), and the diagonal S(x) = Delta~(x, x)."""
    terms = {}
    for i in range(4):
        for j in range(4):
            c = pencil.mu(i, j)
            if c:
                terms[(i, j)] = c
    delta = BiPoly.from_terms(terms)
    line = BiPoly([[0, Fraction(-1)], [Fraction(1)]])  # x1 - x2
    delta_tilde = divide_exact_bivariate(delta, line)
    return delta, delta_tilde, delta_tilde.diagonal()


def delta_infinity_flag(pencil: Pencil) -> int:
    """1 iff the fiber at infinity y^2 = P(x) is a smooth cubic."""
    if pencil.P.degree == 3 and discriminant(pencil.P):
        return 1
    return 0


def _label_from_scalars(m01, m02, m03, m12, m13, m23, d, c3s, disc_s, gcd_degree) -> CaseLabel:
    if not any((m01, m02, m03, m12, m13, m23)):
        kind = CaseKind.COMMON_FACTOR_DEG3 if gcd_degree == 3 else CaseKind.PROPORTIONAL
        return CaseLabel(kind, True, True, True, False)
    if gcd_degree == 1:
        kind = CaseKind.COMMON_FACTOR_DEG1
    elif gcd_degree == 2:
        kind = CaseKind.COMMON_FACTOR_DEG2
    else:
        kind = _CASE_BY_FLAGS[(not m23, not d, not c3s)]
    typical = kind is CaseKind.CASE1 and bool(disc_s)
    return CaseLabel(kind, not m23, not d, not c3s, typical)


def classify(pencil: Pencil) -> CaseLabel:
    """Classification over Q by the scalar genericity tests.

    A degree-2 common factor raises DegreeTwoCommonFactorError; degree-1
    and degree-3 common factors get their own kinds, and otherwise the
    three vanishing conditions select one of the eight table rows.
    Typicality additionally requires S to be separable.
    """
    m = _mu_six(pencil.a, pencil.b)
    m01, m02, m03, m12, m13, m23 = m
    g = poly_gcd(pencil.P, pencil.Q)
    gdeg = int(g.degree) if g else -1
    if gdeg == 2 and any(m):
        raise DegreeTwoCommonFactorError(
            "P and Q share a quadratic factor; every fiber is singular"
        )
    d = m13 * m13 - 4 * m03 * m23
    c3s = _c3_scalar(*m)
    s_poly = s_poly_from_minors(*m)
    disc_s = discriminant(s_poly) if s_poly.degree >= 1 else Fraction(0)
    return _label_from_scalars(m01, m02, m03, m12, m13, m23, d, c3s, disc_s, gdeg)


@lru_cache(maxsize=4096)
def reduce_mod_char(pencil: Pencil, p: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Coefficients of (P, Q) reduced mod p via num * den^{-1}.

    Raises ReductionError when p divides a denominator or when either
    polynomial reduces to zero."""
    def red(c: Fraction) -> int:
        if c.denominator % p == 0:
            raise ReductionError(f"denominator of {c} vanishes mod {p}")
        return c.numerator * pow(c.denominator, -1, p) % p

    a = tuple(red(c) for c in pencil.a)
    b = tuple(red(c) for c in pencil.b)
    if not any(a):
        raise ReductionError(f"P reduces to zero mod {p}")
    if not any(b):
        raise ReductionError(f"Q reduces to zero mod {p}")
    return a, b


def quartic_disc_mod(e: Sequence[int], p: int) -> int:
    """Discriminant of a degree-4 polynomial (constant first, e[4] != 0
    mod p), by the classical closed form, reduced mod p."""
    e0, e1, e2, e3, e4 = (int(c) % p for c in e)
    terms = (
        256 * e4**3 * e0**3
        - 192 * e4**2 * e3 * e1 * e0**2
        - 128 * e4**2 * e2**2 * e0**2
        + 144 * e4**2 * e2 * e1**2 * e0
        - 27 * e4**2 * e1**4
        + 144 * e4 * e3**2 * e2 * e0**2
        - 6 * e4 * e3**2 * e1**2 * e0
        - 80 * e4 * e3 * e2**2 * e1 * e0
        + 18 * e4 * e3 * e2 * e1**3
        + 16 * e4 * e2**4 * e0
        - 4 * e4 * e2**3 * e1**2
        - 27 * e3**4 * e0**2
        + 18 * e3**3 * e2 * e1 * e0
        - 4 * e3**3 * e1**3
        - 4 * e3**2 * e2**3 * e0
        + e3**2 * e2**2 * e1**2
    )
    return terms % p


@lru_cache(maxsize=4096)
def _classify_mod_p_cached(pencil: Pencil, p: int) -> CaseLabel:
    from ._kernels import _gcd_mod_p

    a, b = reduce_mod_char(pencil, p)

    def mu(i, j):
        return (a[i] * b[j] - a[j] * b[i]) % p

    m = (mu(0, 1), mu(0, 2), mu(0, 3), mu(1, 2), mu(1, 3), mu(2, 3))
    m01, m02, m03, m12, m13, m23 = m
    g = _gcd_mod_p(list(a), list(b), p)
    gdeg = len(g) - 1 if g else -1
    d = (m13 * m13 - 4 * m03 * m23) % p
    c3s = _c3_scalar(*m) % p
    disc_s = 0
    if m23 and d and c3s:
        # the quartic is honest (leading coefficient -mu23 != 0)
        disc_s = quartic_disc_mod((-m01, -2 * m02, -(m12 + 3 * m03), -2 * m13, -m23), p)
    return _label_from_scalars(m01, m02, m03, m12, m13, m23, d, c3s, disc_s, gdeg)


def classify_mod_p(pencil: Pencil, F: Union[Field, int]) -> CaseLabel:
    """The same scalar tests applied to the reduction of the pencil at the
    characteristic of F (an odd prime), in plain mod-p arithmetic.

    Unlike the classification over Q, a quadratic common factor appearing
    mod p is reported as a label (the prime is simply excluded upstream)
    rather than raised, since it says nothing about the pencil itself.
    """
    p = F.p if isinstance(F, Field) else int(F)
    if p == 2:
        raise ReductionError("classification mod 2 is not defined")
    return _classify_mod_p_cached(pencil, p)
