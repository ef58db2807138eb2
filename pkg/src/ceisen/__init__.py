"""Exact computation of weight-3/2 Eisenstein coefficients two independent
ways — ternary theta series over quaternion ideal classes, and a closed
class-number formula — together with Brandt-matrix verification suites.

Everything is exact rational arithmetic; there is no floating point anywhere.
"""

from .arith import (
    Discriminant,
    eichler_symbol,
    factorize,
    fundamental_discriminant,
    is_prime,
    kronecker,
    primes_up_to,
)
from .brandt import (
    BrandtMatrix,
    EigenSplitError,
    EigenSystem,
    brandt_matrix,
    brandt_matrices_upto,
    eigenvalue_of,
    eisenstein_e2,
    expected_row_sum,
    rational_eigensystem,
    theta_weight2,
)
from .order import (
    CacheError,
    ClassSearchError,
    IdealClassSet,
    LeftIdeal,
    Lat4,
    MassOvershootError,
    OrderLattice,
    build_class_set,
    classes_from_json,
    classes_to_json,
    eichler_order,
    left_ideal_classes,
    maximal_order,
)
from .qform import (
    LevelConfig,
    class_number,
    closed_form_H,
    corollary_H,
    kronecker_condition,
    mass,
    s_ramified,
    unit_factor,
)
from .quatalg import QuaternionAlgebra, construct_algebra, hilbert_symbol
from .theta32 import (
    HalfIntegralSeries,
    cohen_H,
    cusp_G,
    embedding_count_identity,
    optimal_embedding_count,
    prefill_counts,
    ternary_lattice,
    trace_identity_check,
    vector_count,
)
from .verify import (
    CongruencePreconditionError,
    CongruenceReport,
    DivisibilityRow,
    best_coefficient_congruence,
    coefficient_congruence,
    divisibility_table,
    eigenvalue_congruence,
)

__all__ = [
    "BrandtMatrix",
    "CacheError",
    "ClassSearchError",
    "CongruencePreconditionError",
    "CongruenceReport",
    "Discriminant",
    "DivisibilityRow",
    "EigenSplitError",
    "EigenSystem",
    "HalfIntegralSeries",
    "IdealClassSet",
    "Lat4",
    "LeftIdeal",
    "LevelConfig",
    "MassOvershootError",
    "OrderLattice",
    "QuaternionAlgebra",
    "best_coefficient_congruence",
    "brandt_matrices_upto",
    "brandt_matrix",
    "build_class_set",
    "class_number",
    "classes_from_json",
    "classes_to_json",
    "closed_form_H",
    "coefficient_congruence",
    "cohen_H",
    "construct_algebra",
    "corollary_H",
    "cusp_G",
    "divisibility_table",
    "eichler_order",
    "eichler_symbol",
    "eigenvalue_congruence",
    "eigenvalue_of",
    "eisenstein_e2",
    "embedding_count_identity",
    "expected_row_sum",
    "factorize",
    "fundamental_discriminant",
    "hilbert_symbol",
    "is_prime",
    "kronecker",
    "kronecker_condition",
    "left_ideal_classes",
    "mass",
    "maximal_order",
    "optimal_embedding_count",
    "prefill_counts",
    "primes_up_to",
    "rational_eigensystem",
    "s_ramified",
    "ternary_lattice",
    "theta_weight2",
    "trace_identity_check",
    "unit_factor",
    "vector_count",
]

__version__ = "0.1.0"
