"""momentforge: exact second-moment sums of cubic pencils over finite fields.

The library computes M2 and its extension by the fiber at infinity for
families y^2 = P(x) k + Q(x) three ways (brute force, the O(q) curve
formula, and smooth-model counts with the genus-2 trace), classifies
pencils by the scalar genericity conditions, and measures the empirical
bias of the lower-order moment terms over prime sweeps.
"""

from .field import (
    Field,
    FieldElement,
    PrimePower,
    char_sum_quadratic,
    field_construct,
    is_prime,
    primes_up_to,
    quadratic_character,
    sqrt_in_field,
)
from .polyalg import (
    BiPoly,
    InexactDivisionError,
    UniPoly,
    count_distinct_roots,
    discriminant,
    divide_exact_bivariate,
    frac_poly,
    legendre,
    poly_gcd,
    rational_irreducible_factor_count,
    resultant,
)
from .pencil import (
    CaseKind,
    CaseLabel,
    DegreeTwoCommonFactorError,
    Pencil,
    PencilInvariants,
    ReductionError,
    classify,
    classify_mod_p,
    delta_infinity_flag,
    delta_polys,
    invariants,
    parse_pencil,
)
from .counting import (
    CountBundle,
    CountingError,
    DegenerateReductionError,
    INFINITY,
    LPolynomial,
    NonTypicalReductionError,
    OracleBoundError,
    count_bundle,
    count_C_side,
    count_delta_side,
    curve_defect_from_moment,
    grid_counts_brute,
    quotient_conic_count,
    quotient_identity_check,
    reconstruct_L,
    second_moment_brute,
    second_moment_fast,
    smooth_counts,
    threefold_count_brute,
    trace_a,
)
from .bias import (
    BiasReport,
    SweepPolicy,
    SweepRow,
    averages,
    chebotarev_average,
    predicted_bias,
    stratify,
    sweep,
    sweep_csv_lines,
    write_sweep_csv,
)

__version__ = "0.1.0"
