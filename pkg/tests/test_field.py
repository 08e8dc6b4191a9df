import pytest

from momentforge import (
    PrimePower,
    char_sum_quadratic,
    field_construct,
    is_prime,
    primes_up_to,
    quadratic_character,
    sqrt_in_field,
)

SMALL_ODD_Q = [(3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (3, 2), (5, 2), (3, 3)]


def test_prime_validation():
    with pytest.raises(ValueError):
        field_construct(4, 1)
    with pytest.raises(ValueError):
        field_construct(1, 1)
    with pytest.raises(ValueError):
        PrimePower(7, 4)
    assert field_construct(7, 1).q == 7
    assert is_prime(2) and is_prime(99991) and not is_prime(99989 * 99991)


def test_primes_up_to():
    ps = primes_up_to(30)
    assert ps == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def _irreducibles_in_scan_order(p, k):
    # independent re-scan: monic t^k + ..., no roots in F_p <=> irreducible
    # for k in {2, 3}; tuples enumerated with the constant digit fastest
    found = []
    for i in range(p**k):
        coeffs, v = [], i
        for _ in range(k):
            coeffs.append(v % p)
            v //= p
        poly = coeffs + [1]
        if all(
            sum(c * pow(x, j, p) for j, c in enumerate(poly)) % p for x in range(p)
        ):
            found.append(tuple(coeffs))
    return found


@pytest.mark.parametrize("p,k", [(3, 2), (5, 2), (7, 2), (3, 3), (5, 3), (2, 2), (2, 3)])
def test_modulus_is_first_irreducible_in_scan(p, k):
    F = field_construct(p, k)
    assert F.modulus == _irreducibles_in_scan_order(p, k)[0]


@pytest.mark.parametrize("p,k", [(3, 2), (5, 2), (2, 3), (3, 3)])
def test_field_axioms_exhaustive(p, k):
    F = field_construct(p, k)
    els = list(F.elements())
    assert len(set(e.coeffs for e in els)) == F.q
    one, zero = F.one, F.zero
    for x in els:
        assert x + zero == x and x * one == x
        if x:
            assert x * (one / x) == one
    for x in els[: min(9, F.q)]:
        for y in els:
            assert x + y == y + x and x * y == y * x
            for z in els[:5]:
                assert (x * y) * z == x * (y * z)
                assert x * (y + z) == x * y + x * z


def test_char2_extension_has_no_character():
    F4 = field_construct(2, 2)
    assert len(list(F4.elements())) == 4
    with pytest.raises(ValueError):
        quadratic_character(F4, F4.one)
    with pytest.raises(ValueError):
        sqrt_in_field(F4, F4.one)
    with pytest.raises(ValueError):
        char_sum_quadratic(F4, 1, 0, 1)


def test_quadratic_character_examples():
    F7 = field_construct(7)
    assert quadratic_character(F7, 2) == 1  # squares mod 7 are {1, 2, 4}
    assert quadratic_character(F7, 3) == -1
    assert quadratic_character(F7, 0) == 0


@pytest.mark.parametrize("p,k", SMALL_ODD_Q)
def test_character_is_multiplicative_order_two(p, k):
    F = field_construct(p, k)
    chi = {x.index: quadratic_character(F, x) for x in F.elements()}
    nonzero = [x for x in F.elements() if x]
    assert sum(1 for x in nonzero if chi[x.index] == 1) == (F.q - 1) // 2
    for x in nonzero:
        assert chi[x.index] ** 2 == 1
    for x in nonzero[:12]:
        for y in nonzero:
            assert chi[(x * y).index] == chi[x.index] * chi[y.index]


@pytest.mark.parametrize("p,k", SMALL_ODD_Q)
def test_char_table_agrees_with_exponentiation(p, k):
    F = field_construct(p, k)
    by_pow = [quadratic_character(F, x) for x in F.elements()]
    table = F.chi_table()
    assert by_pow == table


def test_sqrt_examples_and_roundtrip():
    F7 = field_construct(7)
    r = sqrt_in_field(F7, 2)
    assert r == F7.element(3)  # canonical least of {3, 4}
    assert sqrt_in_field(F7, 0) == F7.zero
    assert sqrt_in_field(F7, 3) is None
    for p, k in SMALL_ODD_Q:
        F = field_construct(p, k)
        for x in F.elements():
            r = sqrt_in_field(F, x)
            chi = quadratic_character(F, x)
            if chi >= 0:
                assert r is not None and r * r == x
                # canonical: the least index among the two roots
                assert r.index <= (-r).index
            else:
                assert r is None


def test_tonelli_matches_table():
    F = field_construct(113)  # 113 = 1 mod 16 exercises the general loop
    tonelli = {}
    for x in F.elements():
        r = sqrt_in_field(F, x)
        if r is not None:
            tonelli[x.index] = r.index
    table = F.sqrt_table()
    for x in F.elements():
        if x.index in tonelli:
            assert table[(F.from_index(tonelli[x.index]) ** 2).index] == tonelli[x.index]


def test_char_sum_quadratic_examples():
    F3 = field_construct(3)
    assert char_sum_quadratic(F3, 1, 0, 1) == -1
    for p in (5, 7, 11):
        F = field_construct(p)
        # perfect square (t+1)^2: delta = 0 branch
        assert char_sum_quadratic(F, 1, 2, 1) == p - 1
        # constant summand
        g = next(x for x in F.elements() if x and quadratic_character(F, x) == -1)
        assert char_sum_quadratic(F, 0, 0, g) == -p
        assert char_sum_quadratic(F, 0, 0, 1) == p
        # alpha = 0, beta != 0: bijection, sums to zero
        assert char_sum_quadratic(F, 0, 1, 3) == 0


@pytest.mark.parametrize("p,k", [(3, 1), (5, 1), (7, 1), (3, 2)])
def test_char_sum_matches_brute_force(p, k):
    F = field_construct(p, k)
    chi = F.chi_table()
    els = list(F.elements())
    for alpha in els:
        for beta in els:
            for gamma in els:
                brute = sum(
                    chi[(alpha * t * t + beta * t + gamma).index] for t in els
                )
                assert char_sum_quadratic(F, alpha, beta, gamma) == brute


def test_sq_solution_counts_char2():
    F8 = field_construct(2, 3)
    counts = F8.sq_solution_counts()
    assert counts == [1] * 8  # squaring is a bijection in characteristic 2
    F9 = field_construct(3, 2)
    assert sorted(F9.sq_solution_counts()) == [0] * 4 + [1] + [2] * 4
