import math
from fractions import Fraction as Fr

import pytest

from momentforge import (
    CaseKind,
    SweepPolicy,
    averages,
    chebotarev_average,
    delta_polys,
    field_construct,
    frac_poly,
    legendre,
    predicted_bias,
    second_moment_brute,
    stratify,
    sweep,
    sweep_csv_lines,
)
from momentforge.bias import CSV_HEADER

from families import (
    CASE_PENCILS,
    QMODEL_PENCIL,
    family_bias3,
    family_bias4,
    family_bias5,
)


def test_stratify_typical_row_identity():
    m5 = family_bias5()
    for p in (7, 17, 23, 41, 97, 199):
        row = stratify(m5, p)
        if row.excluded:
            continue
        assert row.f4 == p * p and row.f3 == -p * row.d_p
        assert row.f2 == -p * row.n_s - row.a_inf**2
        assert row.m2 == row.f4 + row.f3 + row.f2
        assert row.m2 == second_moment_brute(m5, field_construct(p))[0]
        assert abs(row.f3) / (p * math.sqrt(p)) <= 4


def test_stratify_excluded_rows():
    m5 = family_bias5()
    row5 = stratify(m5, 5)
    assert row5.excluded and row5.case is None and "denominator" in row5.reason
    row11 = stratify(m5, 11)
    assert row11.excluded and row11.case == "common_factor_deg1"
    assert row11.m2_tilde is not None  # moment still recorded
    with pytest.raises(ValueError):
        stratify(m5, 2)


def test_stratify_case8_records_closed_form_moment():
    pen = CASE_PENCILS["case8"]
    row = stratify(pen, 7)
    assert row.excluded and row.case == "case8"
    sym = legendre(-3, 7)
    assert row.m2_tilde == 49 * (2 + sym) - 1 - sym == 145
    row5 = stratify(pen, 5)
    sym5 = legendre(-3, 5)
    assert row5.m2_tilde == 25 * (2 + sym5) - 1 - sym5 == 25


def test_sweep_bounds_and_degenerate_pencil():
    m5 = family_bias5()
    with pytest.raises(ValueError):
        sweep(m5, 10**7)
    from momentforge import Pencil

    with pytest.raises(ValueError):
        sweep(Pencil((1, 0, 0, 0), (2, 0, 0, 0)), 100)


def test_sweep_single_prime():
    rows = sweep(family_bias3(), 3)
    assert len(rows) == 1 and rows[0].p == 3


def test_sweep_row_count_and_exclusions_to_1e4():
    m5 = family_bias5()
    rows = sweep(m5, 10**4)
    assert len(rows) == 1228  # odd primes up to 10^4
    excluded = [r for r in rows if r.excluded]
    assert len(excluded) <= 20
    assert all(not r.excluded or r.p <= 73 for r in rows)


def test_sweep_deterministic_across_workers():
    m5 = family_bias5()
    rows1 = sweep(m5, 1000, SweepPolicy(workers=1))
    rows3 = sweep(m5, 1000, SweepPolicy(workers=3))
    assert rows1 == rows3
    assert list(sweep_csv_lines(rows1)) == list(sweep_csv_lines(rows3))


def test_averages_exact_identity_and_single_row():
    m5 = family_bias5()
    rows = sweep(m5, 500)
    rep = averages(rows, pencil=m5, x=500)
    assert rep.avg2 + rep.avg_s + rep.avg_ainf2 == 0
    assert rep.predicted == -5
    assert rep.n_included + rep.n_excluded == len(rows)
    single = [r for r in rows if not r.excluded][:1]
    rep1 = averages(single)
    r = single[0]
    assert rep1.avg2 == Fr(r.f2, r.p)
    assert rep1.avg_s == r.n_s
    with pytest.raises(ValueError):
        averages([row for row in rows if row.excluded])


def test_predicted_bias_values():
    assert predicted_bias(family_bias5()) == -5
    assert predicted_bias(family_bias4()) == -4
    assert predicted_bias(family_bias3()) == -3
    assert predicted_bias(QMODEL_PENCIL) == -1 - 0  # irreducible S, deg P = 2
    with pytest.raises(ValueError):
        predicted_bias(CASE_PENCILS["case8"])


def test_chebotarev_average_examples():
    one = chebotarev_average(frac_poly([1, 0, 1]), 10**4)
    assert abs(float(one) - 1) < 0.1
    two = chebotarev_average(frac_poly([1, 0, 1]) * frac_poly([-2, 0, 1]), 10**4)
    assert abs(float(two) - 2) < 0.15
    s5 = delta_polys(family_bias5())[2]
    assert abs(float(chebotarev_average(s5, 10**4)) - 4) < 0.15
    with pytest.raises(ValueError):
        chebotarev_average(frac_poly([3]), 100)


def test_csv_schema_and_formatting():
    m5 = family_bias5()
    rows = sweep(m5, 200)
    lines = list(sweep_csv_lines(rows))
    assert lines[0] == CSV_HEADER
    assert lines[0].count(",") == 13
    for line in lines[1:]:
        assert line.count(",") == 13
    by_p = {int(line.split(",")[0]): line.split(",") for line in lines[1:]}
    row5 = by_p[5]
    assert row5[1] == "reduction_error" and row5[2] == "1" and row5[3] == ""
    included = [line for line in lines[1:] if line.split(",")[2] == "0"]
    cells = included[-1].split(",")
    # integers verbatim, averages with 12 significant digits
    int(cells[3]), int(cells[4]), int(cells[6])
    assert len(cells[12].replace("-", "").replace(".", "").lstrip("0")) <= 12
