import math
import random
from fractions import Fraction as Fr

import pytest

from momentforge import (
    CountingError,
    DegenerateReductionError,
    NonTypicalReductionError,
    OracleBoundError,
    Pencil,
    ReductionError,
    classify_mod_p,
    count_bundle,
    count_C_side,
    count_delta_side,
    curve_defect_from_moment,
    field_construct,
    grid_counts_brute,
    primes_up_to,
    quotient_conic_count,
    quotient_identity_check,
    reconstruct_L,
    second_moment_brute,
    second_moment_fast,
    smooth_counts,
    threefold_count_brute,
    trace_a,
)
from momentforge.counting import _scan, _scan_generic, _scan_kernel

from families import (
    CASE_PENCILS,
    QMODEL_PENCIL,
    WORKED_PENCIL,
    family_bias3,
    family_bias4,
    family_bias5,
    random_pencil,
)

F3 = field_construct(3)


def test_trace_examples():
    assert trace_a(WORKED_PENCIL, F3, 2) == -3
    assert trace_a(WORKED_PENCIL, F3, None) == 0
    assert trace_a(WORKED_PENCIL, F3, float("inf")) == 0
    for q in ((2, 1), (2, 2), (2, 3)):
        F = field_construct(*q)
        for k in list(F.elements()) + [None]:
            assert trace_a(WORKED_PENCIL, F, k) == 0


def test_trace_matches_direct_enumeration():
    F9 = field_construct(3, 2)
    pen = WORKED_PENCIL
    for k in list(F9.elements())[:4] + [None]:
        count = 0
        for x in F9.elements():
            val = (
                pen.P.evaluate(x) * k + pen.Q.evaluate(x)
                if k is not None
                else pen.P.evaluate(x)
            )
            count += sum(1 for y in F9.elements() if y * y == val)
        assert trace_a(pen, F9, k) == 9 - count


def test_second_moment_worked_example():
    assert second_moment_brute(WORKED_PENCIL, F3) == (9, 9)
    assert second_moment_fast(WORKED_PENCIL, F3) == 9
    assert second_moment_brute(WORKED_PENCIL, field_construct(2, 2)) == (0, 0)


def test_delta_and_c_side_worked_example():
    d = count_delta_side(WORKED_PENCIL, F3)
    assert (d.n_delta, d.n_delta_tilde, d.n_s, d.n_p, d.n_p_and_s) == (3, 1, 1, 1, 0)
    assert count_C_side(WORKED_PENCIL, F3) == (5, 2)


def test_threefold_worked_and_even():
    assert threefold_count_brute(WORKED_PENCIL, F3) == 45
    for pk in ((2, 1), (2, 2), (2, 3)):
        F = field_construct(*pk)
        assert threefold_count_brute(WORKED_PENCIL, F) == F.q**3 + F.q**2
    F5 = field_construct(5)
    mt = second_moment_brute(WORKED_PENCIL, F5)[1]
    assert threefold_count_brute(WORKED_PENCIL, F5) == 125 + 25 + mt


def test_threefold_extension_fields():
    rng = random.Random(2)
    for _ in range(3):
        pen = random_pencil(rng)
        for pk in ((3, 2), (5, 2), (3, 3)):
            F = field_construct(*pk)
            try:
                mt = second_moment_brute(pen, F)[1]
            except (ReductionError, DegenerateReductionError):
                continue
            assert threefold_count_brute(pen, F) == F.q**3 + F.q**2 + mt


def test_oracle_bounds_and_env(monkeypatch):
    F37 = field_construct(37)
    with pytest.raises(OracleBoundError):
        threefold_count_brute(WORKED_PENCIL, F37)
    assert threefold_count_brute(WORKED_PENCIL, F37, qmax=37) > 0
    monkeypatch.setenv("MOMENTFORGE_ORACLE_QMAX", "37")
    assert threefold_count_brute(WORKED_PENCIL, F37) > 0
    monkeypatch.delenv("MOMENTFORGE_ORACLE_QMAX")
    F = field_construct(503)
    with pytest.raises(OracleBoundError):
        second_moment_brute(WORKED_PENCIL, F)
    with pytest.raises(OracleBoundError):
        grid_counts_brute(WORKED_PENCIL, F)


def test_fast_equals_brute_across_cases():
    for name, pen in sorted(CASE_PENCILS.items()):
        for p in (3, 5, 7, 11, 13, 31, 61):
            try:
                fast = second_moment_fast(pen, field_construct(p))
            except (ReductionError, DegenerateReductionError):
                continue
            brute = second_moment_brute(pen, field_construct(p))[1]
            assert fast == brute, (name, p)


def test_scan_matches_grid_oracle():
    rng = random.Random(9)
    pencils = list(CASE_PENCILS.values()) + [random_pencil(rng) for _ in range(6)]
    pencils += [family_bias4(), QMODEL_PENCIL]
    for pen in pencils:
        for p in (3, 13, 101):
            F = field_construct(p)
            try:
                sc = _scan(pen, F)
            except (ReductionError, DegenerateReductionError):
                continue
            g = grid_counts_brute(pen, F)
            for key, want in g.items():
                assert getattr(sc, key) == want, (pen, p, key)
            # curve-defect identity
            assert sc.n_c - sc.n_delta == (
                sc.n_c_tilde - sc.n_delta_tilde + p - sc.n_s - sc.n_p + sc.n_p_and_s
            )


def test_grid_oracle_extension_field():
    F9 = field_construct(3, 2)
    sc = _scan(WORKED_PENCIL, F9)
    g = grid_counts_brute(WORKED_PENCIL, F9)
    for key, want in g.items():
        assert getattr(sc, key) == want


def test_generic_and_kernel_paths_agree():
    rng = random.Random(21)
    pencils = [WORKED_PENCIL, family_bias5(), family_bias4(), QMODEL_PENCIL]
    pencils += [random_pencil(rng) for _ in range(8)]
    for pen in pencils:
        for pk in ((3, 1), (7, 1), (31, 1), (101, 1), (3, 2), (7, 2), (13, 2)):
            F = field_construct(*pk)
            try:
                gen = _scan_generic(pen, F)
            except (ReductionError, DegenerateReductionError):
                continue
            assert _scan_kernel(pen, F) == gen, (pen, pk)


def test_proportional_reduction_degenerates():
    pen = Pencil((1, 1, 0, 0), (1, 1, 0, 7))  # proportional mod 7 only
    assert second_moment_fast(pen, field_construct(5)) == second_moment_brute(
        pen, field_construct(5)
    )[1]
    with pytest.raises(DegenerateReductionError):
        count_delta_side(pen, field_construct(7))


def test_char2_curve_counts_refused():
    with pytest.raises(ValueError):
        count_delta_side(WORKED_PENCIL, field_construct(2, 1))


TYPICAL_CHECK_PRIMES = (7, 17, 23, 41, 97, 199)


@pytest.mark.parametrize(
    "pen",
    [family_bias5(), family_bias3(), family_bias4(), QMODEL_PENCIL],
    ids=["bias5", "bias3", "bias4", "qmodel"],
)
def test_smooth_counts_moment_identity(pen):
    for p in TYPICAL_CHECK_PRIMES:
        try:
            label = classify_mod_p(pen, p)
        except ReductionError:
            continue
        if not label.typical:
            continue
        F = field_construct(p)
        sm = smooth_counts(pen, F)
        mt_fast = second_moment_fast(pen, F)
        mt_brute = second_moment_brute(pen, F)[1]
        n_s = count_delta_side(pen, F).n_s
        assert mt_fast == mt_brute
        assert mt_brute == p * (sm.n_c_bar - sm.n_delta_bar + p - n_s)
        assert abs(sm.d) <= 4 * math.sqrt(p)
        assert sm.n_c2 == sm.n_c_bar - sm.n_delta_bar + p + 1
        assert sm.d == -(sm.n_c_bar - sm.n_delta_bar)
        assert curve_defect_from_moment(pen, F, mt_brute) == sm.n_c_bar - sm.n_delta_bar


def test_smooth_counts_refuses_non_typical():
    m5 = family_bias5()
    with pytest.raises(NonTypicalReductionError):
        smooth_counts(m5, field_construct(11))  # common factor appears mod 11
    with pytest.raises(NonTypicalReductionError):
        smooth_counts(CASE_PENCILS["case8"], field_construct(7))
    with pytest.raises(NonTypicalReductionError):
        quotient_conic_count(CASE_PENCILS["case8"], field_construct(7))


def test_smooth_inf_corrections_cancel():
    # d must come from affine counts and the node sum only
    m5 = family_bias5()
    for p in (17, 23, 41):
        F = field_construct(p)
        sc = _scan(m5, F)
        sm = smooth_counts(m5, F)
        assert sm.d == -(sc.smooth.cover_sum + sc.smooth.node_sum - sc.n_delta_tilde)


def test_smooth_counts_both_node_splits():
    # each node resolves to two points iff chi(d) = 1: over F_{p^2} the
    # corrections are always +4
    m5 = family_bias5()
    for p in (17, 23):
        F2 = field_construct(p, 2)
        sc = _scan(m5, F2)
        sm = smooth_counts(m5, F2)
        assert sm.n_delta_bar == sc.n_delta_tilde + 4


def test_genus1_two_field_consistency():
    for pen, p in ((family_bias5(), 17), (family_bias4(), 13), (QMODEL_PENCIL, 7)):
        sm1 = smooth_counts(pen, field_construct(p, 1))
        sm2 = smooth_counts(pen, field_construct(p, 2))
        t = p + 1 - sm1.n_delta_bar
        assert sm2.n_delta_bar == p * p + 1 - (t * t - 2 * p)


def test_quotient_conic_counts():
    assert quotient_conic_count(family_bias4(), field_construct(11)) == 12
    assert quotient_conic_count(QMODEL_PENCIL, field_construct(11)) == 12
    assert quotient_conic_count(QMODEL_PENCIL, field_construct(101)) == 102
    m5 = family_bias5()
    for p in (7, 17, 23):
        assert quotient_conic_count(m5, field_construct(p)) == p + 1
        assert quotient_identity_check(m5, field_construct(p))


def test_conic_discriminant_nonzero_mod_p():
    from momentforge import invariants

    m5 = family_bias5()
    inv = invariants(m5)
    for p in (7, 17, 23, 41):
        if classify_mod_p(m5, p).typical:
            val = inv.conic_discriminant
            assert val.numerator % p != 0


def test_count_bundle_methods_agree():
    pen = family_bias5()
    F = field_construct(17)
    fast = count_bundle(pen, F, method="fast")
    brute = count_bundle(pen, F, method="brute")
    smooth = count_bundle(pen, F, method="smooth")
    for key in ("m2", "m2_tilde", "n_delta", "n_delta_tilde", "n_s", "n_p", "n_c", "n_c_tilde"):
        assert getattr(fast, key) == getattr(brute, key) == getattr(smooth, key)
    assert smooth.d is not None and smooth.n_c2 is not None
    assert fast.case == "case1"
    assert brute.method == "brute"


def test_reconstruct_L_genus1_forced():
    pen = family_bias5()
    p = 17
    sm1 = smooth_counts(pen, field_construct(p, 1))
    sm2 = smooth_counts(pen, field_construct(p, 2))
    t = p + 1 - sm1.n_delta_bar
    L = reconstruct_L([sm1.n_delta_bar, sm2.n_delta_bar], p, genus=1)
    assert L.coeffs == (1, -t, p)
    assert L.weil_check()
    with pytest.raises(CountingError):
        reconstruct_L([sm1.n_delta_bar, sm2.n_delta_bar + 2], p, genus=1)


def test_reconstruct_L_genus2_and_errors():
    pen = family_bias5()
    p = 17
    sm1 = smooth_counts(pen, field_construct(p, 1))
    sm2 = smooth_counts(pen, field_construct(p, 2))
    L = reconstruct_L([sm1.n_c2, sm2.n_c2], p, genus=2)
    assert L.coeffs[0] == 1 and L.coeffs[4] == p * p and L.coeffs[3] == p * L.coeffs[1]
    assert L.weil_check()
    assert L.predicted_count(1) == sm1.n_c2
    assert L.predicted_count(2) == sm2.n_c2
    with pytest.raises(CountingError):
        reconstruct_L([4, 23], 5, genus=2)  # parity breaks integrality
    with pytest.raises(CountingError):
        reconstruct_L([5 + 1 - 100, 25 + 1 - 9], 5, genus=1)  # trace too large


def test_reconstruct_L_genus3():
    pen = Pencil((1, 1, 0, 0), (1, 0, 0, 2))
    counts = [smooth_counts(pen, field_construct(5, k)).n_c_bar for k in (1, 2, 3)]
    L = reconstruct_L(counts, 5, genus=3)
    assert len(L.coeffs) == 7 and L.coeffs[6] == 125
    assert L.weil_check()
    moduli = L.inverse_root_moduli()
    assert all(abs(m - math.sqrt(5)) < 1e-6 for m in moduli)


def test_weil_check_rejects_bad_polynomials():
    from momentforge.counting import LPolynomial

    bad = LPolynomial(genus=1, p=7, coeffs=(1, -6, 7))  # trace 6 > 2 sqrt(7)
    assert not bad.weil_check()
    good = LPolynomial(genus=2, p=137, coeffs=(1, -4, 278, -548, 18769))
    assert good.weil_check()  # (1 - 2T + 137 T^2)^2: repeated inverse roots
