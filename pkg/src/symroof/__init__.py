"""Convex-roof entanglement monotones on Werner, isotropic and related symmetric states."""

from .errors import (
    DomainError,
    IndeterminateRegimeError,
    RegistrationError,
    SolverError,
    StructuralError,
    SymroofError,
    UnsupportedQueryError,
    UnsupportedRegionError,
)
from .families import Family, FamilyPoint, family_to_density, is_separable, monte_carlo_twirl, twirl
from .monotones import (
    MonotoneSpec,
    concurrence_ck,
    entropy_of_entanglement,
    generalized_entropy,
    parse_monotone,
    renyi_entropy,
    vidal_ek,
)
from .oracle import (
    OracleEstimate,
    SearchBudget,
    min_on_iso_fiber,
    min_on_werner_fiber,
    roof_upper_bound_by_decompositions,
    witness_oracle,
)
from .qcore import (
    DensityMatrix,
    OperatorKind,
    PureState,
    SchmidtVector,
    build_operator,
    expectation,
    fiber_state_isotropic,
    fiber_state_werner,
    haar_unitary,
    majorizes,
    schmidt_decompose,
)
from .roofs import (
    EnvelopeFunction,
    MinimizerProfile,
    Region,
    convex_envelope_1d,
    extended_roof,
    iso_c2_roof,
    iso_cd_roof,
    iso_entropy_minimum,
    iso_lambda_beta,
    iso_lower_bound_roof,
    iso_vidal_roof,
    orbit_membership_certificate,
    region_membership,
    roof_isotropic,
    roof_werner,
    werner_minimizer,
)
from .witness import Verdict, WitnessResult, pure_to_isotropic_nogo, pure_to_two_qubit, pure_to_werner

__version__ = "0.1.0"
