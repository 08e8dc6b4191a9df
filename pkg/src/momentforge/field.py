"""Exact arithmetic in F_q for q = p^k with k <= 3.

Provides the quadratic character, deterministic square roots, and the
closed-form quadratic character sum used by the fast point counts.
Fields and their elements are immutable values, safe to share across
worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Optional, Sequence, Union

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

# Residue/sqrt lookup tables are only materialised for small fields; larger
# fields fall back to exponentiation (callers that need bulk tables build
# their own transient arrays).
TABLE_LIMIT = 1 << 20


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    """All primes <= n by sieve."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i in range(2, n + 1) if sieve[i]]


@dataclass(frozen=True)
class PrimePower:
    """q = p^k with p prime and 1 <= k <= 3."""

    p: int
    k: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if not 1 <= self.k <= 3:
            raise ValueError(f"extension degree {self.k} outside [1, 3]")

    @property
    def q(self) -> int:
        return self.p**self.k


class FieldElement:
    """Element of a Field, stored as reduced coefficient tuple of length k."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: "Field", coeffs: tuple[int, ...]):
        self.field = field
        self.coeffs = coeffs

    def __add__(self, other):
        return FieldElement(self.field, self.field._add(self.coeffs, self.field._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field._sub(self.coeffs, self.field._coerce(other)))

    def __rsub__(self, other):
        return FieldElement(self.field, self.field._sub(self.field._coerce(other), self.coeffs))

    def __mul__(self, other):
        return FieldElement(self.field, self.field._mul(self.coeffs, self.field._coerce(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, self.field._neg(self.coeffs))

    def __truediv__(self, other):
        return FieldElement(
            self.field, self.field._mul(self.coeffs, self.field._inv(self.field._coerce(other)))
        )

    def __rtruediv__(self, other):
        return FieldElement(
            self.field, self.field._mul(self.field._coerce(other), self.field._inv(self.coeffs))
        )

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field._pow(self.coeffs, e))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.coeffs == other.coeffs and self.field is other.field
        if isinstance(other, int):
            return self.coeffs == self.field._coerce(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    @property
    def index(self) -> int:
        """Canonical integer encoding sum(c_i * p^i); fixes element order."""
        p, out = self.field.p, 0
        for c in reversed(self.coeffs):
            out = out * p + c
        return out

    def __repr__(self):
        return f"FieldElement({list(self.coeffs)} in F_{self.field.q})"


class Field:
    """F_{p^k} with a fixed monic irreducible modulus (identity poly for k=1).

    The modulus is the lexicographically smallest monic irreducible of
    degree k over F_p (scanning non-leading coefficient tuples in counting
    order), so element encodings and all downstream counts are reproducible.
    """

    def __init__(self, prime_power: PrimePower, modulus: tuple[int, ...]):
        self.prime_power = prime_power
        self.p = prime_power.p
        self.k = prime_power.k
        self.q = prime_power.q
        self.modulus = modulus
        self._chi_table: Optional[list[int]] = None
        self._sqrt_table: Optional[list[Optional[int]]] = None
        self._sqcount_table: Optional[list[int]] = None

    # -- construction of elements ------------------------------------------

    def element(self, value: Union[int, "FieldElement", Sequence[int]]) -> FieldElement:
        """Coerce an int (prime-subfield embedding), coefficient sequence,
        or element of the same field."""
        return FieldElement(self, self._coerce(value))

    def from_index(self, i: int) -> FieldElement:
        p = self.p
        coeffs = []
        for _ in range(self.k):
            coeffs.append(i % p)
            i //= p
        return FieldElement(self, tuple(coeffs))

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, (0,) * self.k)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, (1,) + (0,) * (self.k - 1))

    def elements(self) -> Iterator[FieldElement]:
        """All q elements in canonical index order."""
        for i in range(self.q):
            yield self.from_index(i)

    # -- raw coefficient-tuple arithmetic ------------------------------------

    def _coerce(self, value) -> tuple[int, ...]:
        if isinstance(value, FieldElement):
            if value.field is not self and value.field.q != self.q:
                raise ValueError("element from a different field")
            return value.coeffs
        if isinstance(value, int):
            return (value % self.p,) + (0,) * (self.k - 1)
        coeffs = tuple(int(c) % self.p for c in value)
        if len(coeffs) != self.k:
            raise ValueError(f"need {self.k} coefficients, got {len(coeffs)}")
        return coeffs

    def _add(self, u, v):
        p = self.p
        return tuple((a + b) % p for a, b in zip(u, v))

    def _sub(self, u, v):
        p = self.p
        return tuple((a - b) % p for a, b in zip(u, v))

    def _neg(self, u):
        p = self.p
        return tuple((-a) % p for a in u)

    def _mul(self, u, v):
        p, k = self.p, self.k
        if k == 1:
            return (u[0] * v[0] % p,)
        prod = [0] * (2 * k - 1)
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    prod[i + j] += a * b
        # reduce by the monic modulus
        m = self.modulus
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d] % p
            if c:
                for j in range(k):
                    prod[d - k + j] -= c * m[j]
            prod[d] = 0
        return tuple(c % p for c in prod[:k])

    def _pow(self, u, e: int):
        if e < 0:
            u, e = self._inv(u), -e
        result = (1,) + (0,) * (self.k - 1)
        base = u
        while e:
            if e & 1:
                result = self._mul(result, base)
            base = self._mul(base, base)
            e >>= 1
        return result

    def _inv(self, u):
        if not any(u):
            raise ZeroDivisionError("inverse of zero field element")
        if self.k == 1:
            return (pow(u[0], self.p - 2, self.p),)
        return self._pow(u, self.q - 2)

    # -- small lookup tables -------------------------------------------------

    def chi_table(self) -> list[int]:
        """Quadratic-character table indexed by element index (odd char only)."""
        if self.p == 2:
            raise ValueError("quadratic character undefined in characteristic 2")
        if self._chi_table is None:
            if self.q > TABLE_LIMIT:
                raise ValueError(f"character table over F_{self.q} exceeds limit")
            table = [-1] * self.q
            table[0] = 0
            for x in self.elements():
                sq = x * x
                table[sq.index] = 0 if not sq else 1
            self._chi_table = table
        return self._chi_table

    def sqrt_table(self) -> list[Optional[int]]:
        """Index of the canonically least square root per square, else None."""
        if self._sqrt_table is None:
            if self.q > TABLE_LIMIT:
                raise ValueError(f"sqrt table over F_{self.q} exceeds limit")
            table: list[Optional[int]] = [None] * self.q
            for i in range(self.q - 1, -1, -1):
                x = self.from_index(i)
                table[(x * x).index] = i
            self._sqrt_table = table
        return self._sqrt_table

    def sq_solution_counts(self) -> list[int]:
        """#{y : y^2 = v} per index; valid in every characteristic."""
        if self._sqcount_table is None:
            if self.q > TABLE_LIMIT:
                raise ValueError(f"square-count table over F_{self.q} exceeds limit")
            table = [0] * self.q
            for x in self.elements():
                table[(x * x).index] += 1
            self._sqcount_table = table
        return self._sqcount_table

    def __repr__(self):
        return f"Field(F_{self.q})"

    def __reduce__(self):
        # pickle support for worker processes: rebuild through the cache
        return (field_construct, (self.p, self.k))


def _poly_has_root(coeffs: Sequence[int], p: int) -> bool:
    for x in range(p):
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * x + c) % p
        if acc == 0:
            return True
    return False


def _smallest_irreducible(p: int, k: int) -> tuple[int, ...]:
    # monic t^k + c_{k-1} t^{k-1} + ... + c_0; scan (c_{k-1},...,c_0) in
    # counting order with c_0 fastest. For k in {2,3} irreducible <=> rootless.
    for i in range(p**k):
        coeffs, v = [], i
        for _ in range(k):
            coeffs.append(v % p)
            v //= p
        if not _poly_has_root(coeffs + [1], p):
            return tuple(coeffs)
    raise AssertionError("no irreducible polynomial found")  # unreachable


@lru_cache(maxsize=None)
def field_construct(p: int, k: int = 1) -> Field:
    """Build F_{p^k} (k <= 3) with the deterministic smallest modulus.

    Characteristic-2 extension fields are constructible for plain point
    counting, but the quadratic character, square roots and character sums
    refuse to operate on them.
    """
    pp = PrimePower(p, k)
    if k == 1:
        modulus = (0,)  # placeholder; k=1 needs no reduction
    else:
        modulus = _smallest_irreducible(p, k)
    return Field(pp, modulus)


def quadratic_character(F: Field, x: Union[int, FieldElement]) -> int:
    """Order-2 multiplicative character, extended by 0 at 0.

    Computed by exponentiation x^((q-1)/2); a cached residue table is used
    transparently for small fields (both paths agree, see tests).
    """
    if F.p == 2:
        raise ValueError("quadratic character undefined in characteristic 2")
    el = F.element(x)
    if not el:
        return 0
    if F._chi_table is not None:
        return F._chi_table[el.index]
    if F.k == 1:
        return 1 if pow(el.coeffs[0], (F.p - 1) // 2, F.p) == 1 else -1
    return 1 if el ** ((F.q - 1) // 2) == F.one else -1


def sqrt_in_field(F: Field, x: Union[int, FieldElement]) -> Optional[FieldElement]:
    """Some r with r^2 = x, canonically the least-index choice; None if x
    is a non-residue. Odd characteristic only."""
    if F.p == 2:
        raise ValueError("square roots by character not defined in characteristic 2")
    el = F.element(x)
    if not el:
        return F.zero
    if quadratic_character(F, el) == -1:
        return None
    if F._sqrt_table is not None:
        idx = F._sqrt_table[el.index]
        assert idx is not None
        return F.from_index(idx)
    r = _tonelli_shanks(F, el)
    r2 = -r
    return r if r.index <= r2.index else r2


def _tonelli_shanks(F: Field, x: FieldElement) -> FieldElement:
    q = F.q
    if q % 4 == 3:
        return x ** ((q + 1) // 4)
    m, s = q - 1, 0
    while m % 2 == 0:
        m //= 2
        s += 1
    z = next(el for el in F.elements() if el and quadratic_character(F, el) == -1)
    c = z**m
    t = x**m
    r = x ** ((m + 1) // 2)
    while t != F.one:
        t2, i = t, 0
        while t2 != F.one:
            t2 = t2 * t2
            i += 1
        b = c ** (1 << (s - i - 1))
        r = r * b
        c = b * b
        t = t * c
        s = i
    return r


def char_sum_quadratic(
    F: Field,
    alpha: Union[int, FieldElement],
    beta: Union[int, FieldElement],
    gamma: Union[int, FieldElement],
) -> int:
    """sum over t in F_q of chi(alpha t^2 + beta t + gamma), in closed form.

    Four branches on (alpha, Delta) with Delta = 4 alpha gamma - beta^2.
    For alpha = 0 and beta != 0 the argument is a bijection of F_q, so the
    sum is 0; for alpha = beta = 0 every term is chi(gamma).
    """
    if F.p == 2:
        raise ValueError("character sum undefined in characteristic 2")
    a, b, g = F.element(alpha), F.element(beta), F.element(gamma)
    delta = 4 * a * g - b * b
    if a:
        if delta:
            return -quadratic_character(F, a)
        return (F.q - 1) * quadratic_character(F, a)
    if delta:
        return 0
    return F.q * quadratic_character(F, g)
