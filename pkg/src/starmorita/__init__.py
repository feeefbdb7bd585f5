"""starmorita: exact computer algebra for *-algebras over ordered rings.

Positivity certificates for Hermitian matrices and linear functionals, the
GNS construction, algebraic Rieffel induction, formal Morita equivalence of
finite-dimensional *-algebras, and classical limits of deformed structures.
All arithmetic is exact (arbitrary-precision rationals, a formal parameter
with the lambda-adic ordering, and their fraction fields); every verdict
comes with a replayable certificate or witness."""

from .algebra import (
    ApproxIdentityWitness,
    LinearFunctional,
    StarAlgebra,
    StarHomomorphism,
    builtin_algebra,
    deformation_container,
    density_functional,
    element_positivity,
    functional_positivity,
    grassmann_algebra,
    identity_structure,
    matrix_algebra,
    nilpotent_normal_scan,
    scalars_algebra,
    tensor_product,
    trace_functional,
    validate_algebra,
    vector_state,
)
from .bimodule import (
    Bimodule,
    CyclicLevel,
    CyclicStructure,
    CyclicSubmodule,
    conjugate,
    corner_bimodule,
    finite_rank_algebra,
    free_module_bimodule,
    homomorphism_bimodule,
    prehilbert_bimodule,
    quotient_by_N,
    tensor_bimodules,
    tensor_bimodules_external,
    theta,
    validate_bimodule,
)
from .classical import (
    cl_bimodule,
    cl_operator,
    cl_prehilbert,
    cl_representation,
    deformed_homomorphism_bimodule,
    naturality_check,
    positive_lift_check,
)
from .linalg import (
    Matrix,
    PsdCertificate,
    congruence_diagonalize,
    forced_zero_entries,
    kernel_basis,
    kron,
    psd_decide,
    solve,
    trace,
    verify_psd_certificate,
)
from .prehilbert import (
    InnerProductModule,
    Intertwiner,
    Representation,
    commutant_basis,
    defining_representation,
    direct_sum,
    gns,
    intertwiners,
    quotient_by_null,
    validate_representation,
)
from .rieffel import (
    center_isomorphism,
    gns_via_induction_compare,
    induce,
    induce_intertwiner,
    morita_context_check,
    roundtrip_unitary,
)
from .rings import (
    DEFORMATION,
    LAM,
    RATIONAL,
    BaseElement,
    FracScalar,
    Scalar,
    classical_limit_scalar,
    frac,
    lambda_order,
    sign,
)
