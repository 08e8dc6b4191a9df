"""Exact univariate/bivariate polynomial arithmetic over Q and over F_q.

Coefficients are either fractions.Fraction (for Q) or field.FieldElement
(for F_q); both behave as field scalars, so resultants, discriminants,
gcds and exact division work uniformly over either ring.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence, Union

from .field import Field, FieldElement, quadratic_character

NEG_INF = float("-inf")


class InexactDivisionError(ArithmeticError):
    """Bivariate division left a remainder that should have been zero."""


class UniPoly:
    """Dense univariate polynomial, constant coefficient first, trailing
    zeros stripped. The zero polynomial has degree -inf."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence = ()):
        cs = list(coeffs)
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, UniPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __getitem__(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __add__(self, other: "UniPoly"):
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly([self[i] + other[i] for i in range(n)])

    def __sub__(self, other: "UniPoly"):
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly([self[i] - other[i] for i in range(n)])

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, UniPoly):  # scalar
            return UniPoly([c * other for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return UniPoly()
        out = [None] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                t = a * b
                out[i + j] = t if out[i + j] is None else out[i + j] + t
        return UniPoly(out)

    __rmul__ = __mul__

    @property
    def lead(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def evaluate(self, x):
        acc = x - x  # zero of the coefficient/point ring
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "UniPoly":
        return UniPoly([i * c for i, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "UniPoly":
        if not self.coeffs:
            return self
        lead = self.coeffs[-1]
        return UniPoly([c / lead for c in self.coeffs])

    def __repr__(self):
        return f"UniPoly({list(self.coeffs)})"


def divmod_poly(f: UniPoly, g: UniPoly) -> tuple[UniPoly, UniPoly]:
    """Division with remainder; coefficients must form a field."""
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(f.coeffs)
    dg = len(g.coeffs) - 1
    quo = [None] * max(len(rem) - dg, 0)
    inv_lead = g.coeffs[-1]
    while len(rem) - 1 >= dg and rem:
        c = rem[-1] / inv_lead
        shift = len(rem) - 1 - dg
        quo[shift] = c
        for i, gc in enumerate(g.coeffs):
            rem[shift + i] = rem[shift + i] - c * gc
        while rem and not rem[-1]:
            rem.pop()
    return UniPoly([0 if c is None else c for c in quo]), UniPoly(rem)


def poly_gcd(f: UniPoly, g: UniPoly) -> UniPoly:
    """Monic gcd over a coefficient field."""
    a, b = f, g
    while b:
        a, b = b, divmod_poly(a, b)[1]
    return a.monic() if a else a


def _det(rows: list[list]) -> object:
    """Exact determinant by Gaussian elimination over a coefficient field."""
    n = len(rows)
    m = [row[:] for row in rows]
    det = None
    sign = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col]), None)
        if pivot is None:
            return rows[0][0] - rows[0][0]  # zero of the ring
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            sign = -sign
        pv = m[col][col]
        det = pv if det is None else det * pv
        for r in range(col + 1, n):
            if m[r][col]:
                factor = m[r][col] / pv
                for c in range(col, n):
                    m[r][c] = m[r][c] - factor * m[col][c]
    return det if sign == 1 else -det


def resultant(
    f: UniPoly,
    g: UniPoly,
    deg_f: Optional[int] = None,
    deg_g: Optional[int] = None,
):
    """Sylvester-matrix resultant; optional declared degrees allow the
    formal resultant of a family whose leading coefficient may vanish."""
    if not f and not g:
        raise ValueError("resultant of two zero polynomials")
    zero = (f.coeffs or g.coeffs)[0]
    zero = zero - zero
    if not f or not g:
        return zero
    m = int(f.degree) if deg_f is None else deg_f
    n = int(g.degree) if deg_g is None else deg_g
    if m < f.degree or n < g.degree:
        raise ValueError("declared degree below the true degree")
    if m + n == 0:
        return zero + 1
    size = m + n
    fc = [f[i] + zero for i in range(m + 1)]
    gc = [g[i] + zero for i in range(n + 1)]
    rows = []
    for i in range(n):
        row = [zero] * size
        for j in range(m + 1):
            row[i + j] = fc[m - j]
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for j in range(n + 1):
            row[i + j] = gc[n - j]
        rows.append(row)
    return _det(rows)


def discriminant(f: UniPoly):
    """(-1)^(n(n-1)/2) Res(f, f') / lc(f) for n = deg f >= 1."""
    n = f.degree
    if not f or n < 1:
        raise ValueError("discriminant requires degree >= 1")
    n = int(n)
    fp = f.derivative()
    if not fp:  # inseparable in small characteristic
        return f.lead - f.lead
    res = resultant(f, fp, deg_f=n, deg_g=n - 1)
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * res / f.lead


class BiPoly:
    """Dense bivariate polynomial; grid[i][j] is the coefficient of
    x1^i x2^j. Rows/columns are trimmed to a canonical shape."""

    __slots__ = ("grid",)

    def __init__(self, grid: Sequence[Sequence] = ()):
        rows = [list(r) for r in grid]
        width = 0
        for r in rows:
            while r and not r[-1]:
                r.pop()
            width = max(width, len(r))
        while rows and not rows[-1]:
            rows.pop()
        self.grid = tuple(tuple(r[j] if j < len(r) else 0 for j in range(width)) for r in rows)

    def __bool__(self):
        return bool(self.grid)

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self._terms() == other._terms()

    def __hash__(self):
        return hash(tuple(sorted(self._terms().items())))

    def _terms(self) -> dict:
        return {
            (i, j): c
            for i, row in enumerate(self.grid)
            for j, c in enumerate(row)
            if c
        }

    def coeff(self, i: int, j: int):
        if 0 <= i < len(self.grid) and 0 <= j < len(self.grid[i]):
            return self.grid[i][j]
        return 0

    @staticmethod
    def from_terms(terms: dict) -> "BiPoly":
        if not terms:
            return BiPoly()
        ni = max(i for i, _ in terms) + 1
        nj = max(j for _, j in terms) + 1
        grid = [[0] * nj for _ in range(ni)]
        for (i, j), c in terms.items():
            grid[i][j] = c
        return BiPoly(grid)

    def __add__(self, other: "BiPoly"):
        terms = dict(self._terms())
        for key, c in other._terms().items():
            terms[key] = terms[key] + c if key in terms else c
        return BiPoly.from_terms({k: v for k, v in terms.items() if v})

    def __sub__(self, other: "BiPoly"):
        return self + (-other)

    def __neg__(self):
        return BiPoly([[-c for c in row] for row in self.grid])

    def __mul__(self, other):
        if not isinstance(other, BiPoly):
            return BiPoly([[c * other for c in row] for row in self.grid])
        out: dict = {}
        for (i1, j1), c1 in self._terms().items():
            for (i2, j2), c2 in other._terms().items():
                key = (i1 + i2, j1 + j2)
                t = c1 * c2
                out[key] = out[key] + t if key in out else t
        return BiPoly.from_terms({k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def swap_vars(self) -> "BiPoly":
        return BiPoly.from_terms({(j, i): c for (i, j), c in self._terms().items()})

    def diagonal(self) -> UniPoly:
        """Restriction to x1 = x2 = x as a univariate polynomial."""
        if not self.grid:
            return UniPoly()
        out = [0] * (len(self.grid) + len(self.grid[0]))
        for (i, j), c in self._terms().items():
            out[i + j] = out[i + j] + c
        return UniPoly(out)

    def evaluate(self, x1, x2):
        acc = x1 - x1
        for row in reversed(self.grid):
            racc = x1 - x1
            for c in reversed(row):
                racc = racc * x2 + c
            acc = acc * x1 + racc
        return acc

    def _leading(self) -> tuple[int, int]:
        # lex order with x1 > x2
        i = len(self.grid) - 1
        row = self.grid[i]
        j = len(row) - 1
        while not row[j]:
            j -= 1
        return i, j

    def __repr__(self):
        return f"BiPoly({[list(r) for r in self.grid]})"


def divide_exact_bivariate(num: BiPoly, den: BiPoly) -> BiPoly:
    """Exact quotient num / den in the bivariate polynomial ring.

    Raises InexactDivisionError when den does not divide num; a remainder
    here signals a programming error upstream, since the callers only
    divide polynomials that are divisible by construction.
    """
    if not den:
        raise ZeroDivisionError("bivariate division by zero polynomial")
    if not num:
        return BiPoly()
    di, dj = den._leading()
    dlead = den.grid[di][dj]
    quo: dict = {}
    rem = num
    while rem:
        i, j = rem._leading()
        if i < di or j < dj:
            raise InexactDivisionError("division is not exact")
        c = rem.grid[i][j] / dlead
        key = (i - di, j - dj)
        quo[key] = quo.get(key, 0) + c
        shifted = BiPoly.from_terms(
            {(a + i - di, b + j - dj): v * c for (a, b), v in den._terms().items()}
        )
        new = rem - shifted
        if new._terms() and max(new._terms()) >= (i, j):
            raise InexactDivisionError("division did not reduce the leading term")
        rem = new
    return BiPoly.from_terms(quo)


def count_distinct_roots(f: UniPoly, F: Field, method: str = "auto") -> int:
    """#{a in F_q : f(a) = 0}, multiplicity ignored.

    Direct evaluation for q < 2^16, gcd(f, x^q - x) degree beyond; the two
    paths agree on their overlap (tested) and either can be forced.
    """
    if not f:
        raise ValueError("root count of the zero polynomial")
    coeffs = []
    for c in f.coeffs:
        if isinstance(c, FieldElement):
            coeffs.append(c)
        elif isinstance(c, int):
            coeffs.append(F.element(c))
        elif isinstance(c, Fraction) and c.denominator == 1:
            coeffs.append(F.element(int(c)))
        else:
            raise TypeError(f"coefficient {c!r} is not an element of F_{F.q}")
    fF = UniPoly(coeffs)
    if not fF:
        raise ValueError("polynomial reduces to zero over this field")
    if method == "auto":
        method = "direct" if F.q < (1 << 16) else "gcd"
    if method == "direct":
        if F.k == 1 and F.q >= 64:
            from . import _kernels

            return _kernels.count_roots_prime([c.coeffs[0] for c in fF.coeffs], F.p)
        return sum(1 for x in F.elements() if not fF.evaluate(x))
    if method != "gcd":
        raise ValueError(f"unknown method {method!r}")
    # x^q mod f by square-and-multiply
    def sq_mod(a):
        return divmod_poly(a * a, fF)[1]

    if fF.degree < 1:
        return 0
    xq = UniPoly([F.zero, F.one])
    result = UniPoly([F.one])
    e = F.q
    while e:
        if e & 1:
            result = divmod_poly(result * xq, fF)[1]
        e >>= 1
        if e:
            xq = sq_mod(xq)
    frob = result - UniPoly([F.zero, F.one])
    g = poly_gcd(fF, frob)
    return int(g.degree) if g else int(fF.degree)


# -- factor counting over Q -------------------------------------------------


def _to_primitive_int(f: UniPoly) -> list[int]:
    fracs = [Fraction(c) for c in f.coeffs]
    den = math.lcm(*(c.denominator for c in fracs)) if fracs else 1
    ints = [int(c * den) for c in fracs]
    g = math.gcd(*(abs(c) for c in ints))
    return [c // g for c in ints]


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    for d in range(1, int(math.isqrt(n)) + 1):
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
    return sorted(out)


def _rational_roots(f: UniPoly) -> list[Fraction]:
    """All rational roots (each once) of a nonzero polynomial over Q."""
    ints = _to_primitive_int(f)
    roots = []
    shift = 0
    while ints and ints[0] == 0:
        ints = ints[1:]
        shift += 1
    if shift:
        roots.append(Fraction(0))
    if len(ints) <= 1:
        return roots
    poly = UniPoly([Fraction(c) for c in ints])
    for num in _divisors(ints[0]):
        for den in _divisors(ints[-1]):
            for sign in (1, -1):
                cand = Fraction(sign * num, den)
                if cand not in roots and not poly.evaluate(cand):
                    roots.append(cand)
    return sorted(roots)


def _is_rational_square(x: Fraction) -> Optional[Fraction]:
    if x < 0:
        return None
    rn, rd = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


def _quartic_splits_in_quadratics(f: UniPoly) -> Optional[int]:
    """For a monic rational quartic without rational roots: number of
    distinct rational quadratic factors (1 or 2), or None if irreducible.

    Uses the resolvent cubic z^3 - q z^2 + (pr - 4s) z - (p^2 s - 4qs + r^2)
    whose rational roots z = b + d witness splittings (x^2+ax+b)(x^2+cx+d).
    """
    s0, r0, q0, p0 = (Fraction(f[i]) for i in range(4))
    resolvent = UniPoly(
        [
            -(p0 * p0 * s0 - 4 * q0 * s0 + r0 * r0),
            p0 * r0 - 4 * s0,
            -q0,
            Fraction(1),
        ]
    )
    for z in _rational_roots(resolvent):
        d1 = p0 * p0 - 4 * q0 + 4 * z
        sq = _is_rational_square(d1)
        if sq is None:
            continue
        if d1:
            a = (p0 + sq) / 2
            c = (p0 - sq) / 2
            b = (r0 - a * z) / (c - a)
            d = z - b
        else:
            # a = c = p/2 forces a(b+d) = r
            if p0 * z != 2 * r0:
                continue
            d2 = _is_rational_square(z * z - 4 * s0)
            if d2 is None:
                continue
            a = c = p0 / 2
            b = (z + d2) / 2
            d = (z - d2) / 2
        if b * d == s0 and a * d + b * c == r0 and b + d == z:
            return 1 if (a, b) == (c, d) else 2
    return None


def rational_irreducible_factor_count(f: UniPoly) -> int:
    """Number of distinct irreducible factors of f over Q, 1 <= deg f <= 4.

    Rational roots are located by the bounded divisor search on the
    primitive integer model and stripped to full multiplicity; a residual
    quartic is split (or not) by the resolvent-cubic criterion.
    """
    if not f or not 1 <= f.degree <= 4:
        raise ValueError("factor counting needs degree in [1, 4]")
    work = UniPoly([Fraction(c) for c in f.coeffs]).monic()
    roots = _rational_roots(work)
    for r in roots:
        lin = UniPoly([-r, Fraction(1)])
        while True:
            quo, rem = divmod_poly(work, lin)
            if rem:
                break
            work = quo
    count = len(roots)
    deg = work.degree
    if deg == NEG_INF or deg == 0:
        return count
    if deg in (2, 3):
        return count + 1
    split = _quartic_splits_in_quadratics(work)
    return count + (split if split is not None else 1)


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def frac_poly(coeffs: Sequence[Union[int, str, Fraction]]) -> UniPoly:
    """UniPoly over Q from ints, strings like '3/4', or Fractions."""
    return UniPoly([Fraction(c) for c in coeffs])
