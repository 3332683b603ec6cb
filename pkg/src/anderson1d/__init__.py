"""Scattering, criticality, and Lyapunov tools for 1-D single-site Anderson models.

The model is H = -d^2/dx^2 + sum_n q_n f(x - n) on the line, with q_n
i.i.d. Bernoulli and f a piecewise-constant bump supported on
[-1/2, 1/2]. The package computes scattering coefficients and transfer
matrices for f, locates the critical-energy set where the usual
positivity argument for the Lyapunov exponent degenerates, certifies
the group-theoretic hypotheses behind that argument, and estimates
Lyapunov exponents by Monte Carlo.
"""

__version__ = "0.1.0"

from .criticality import (
    CriticalityReport,
    CriticalType,
    ReflectionScan,
    classify_energy,
    example1_critical_types,
    example2_reflectionless,
    negative_axis_zeros,
    nj_construction,
    scan_reflection_zeros,
)
from .errors import (
    ComputationError,
    KTooSmall,
    NonFiniteValue,
    NonMonotoneBreakpoints,
    NonPositiveK,
    NonRealK,
    NumericOverflow,
    OutOfClosedFormRange,
    Overflow,
    PotentialError,
    SpecMismatch,
    SupportOutOfRange,
    WitnessNotFound,
    ZeroReflection,
)
from .experiments import (
    Type2Result,
    Type2Spec,
    drift_check,
    sqrt_growth_experiment,
    type2_pair_distribution,
)
from .furstenberg import (
    NormGainProfile,
    WitnessResult,
    apply_to_direction,
    conjugate_to_tilde,
    direction_of,
    negative_energy_unstable_check,
    noncompactness_witness,
    norm_gain_profile,
    normalize_direction,
    projective_distance,
    r_squared_identity_check,
    strong_irreducibility_check,
)
from .lyapunov import (
    EnsembleConfig,
    GammaCurveRow,
    LyapunovEstimate,
    free_hyperbolic_rate,
    gamma_curve,
    lyapunov_matrix_estimate,
    lyapunov_vector_estimate,
    philox_bits,
    realization_bits,
)
from .potential import (
    SingleSitePotential,
    example1_potential,
    example2_potential,
    free_potential,
    load_potential,
    potential_sha256,
    refine,
    save_potential,
    validate,
)
from .scattering import (
    ScatteringData,
    SpectralPoint,
    entire_cos_sin,
    example1_scattering,
    example2_transfer,
    free_transfer_matrix,
    jost_ab,
    jost_coefficients,
    matrix_two_norm,
    piece_propagator,
    spectral_point,
    transfer_from_scattering,
    transfer_matrix,
)

__all__ = [
    "__version__",
    # potentials
    "SingleSitePotential",
    "validate",
    "refine",
    "free_potential",
    "example1_potential",
    "example2_potential",
    "save_potential",
    "load_potential",
    "potential_sha256",
    # scattering
    "SpectralPoint",
    "ScatteringData",
    "spectral_point",
    "entire_cos_sin",
    "piece_propagator",
    "transfer_matrix",
    "free_transfer_matrix",
    "jost_coefficients",
    "jost_ab",
    "transfer_from_scattering",
    "matrix_two_norm",
    "example1_scattering",
    "example2_transfer",
    # criticality
    "CriticalityReport",
    "CriticalType",
    "ReflectionScan",
    "classify_energy",
    "scan_reflection_zeros",
    "negative_axis_zeros",
    "example2_reflectionless",
    "nj_construction",
    "example1_critical_types",
    # group hypotheses
    "NormGainProfile",
    "WitnessResult",
    "normalize_direction",
    "projective_distance",
    "direction_of",
    "apply_to_direction",
    "conjugate_to_tilde",
    "norm_gain_profile",
    "r_squared_identity_check",
    "noncompactness_witness",
    "strong_irreducibility_check",
    "negative_energy_unstable_check",
    # Lyapunov
    "EnsembleConfig",
    "LyapunovEstimate",
    "GammaCurveRow",
    "philox_bits",
    "realization_bits",
    "lyapunov_vector_estimate",
    "lyapunov_matrix_estimate",
    "gamma_curve",
    "free_hyperbolic_rate",
    # experiments
    "Type2Spec",
    "Type2Result",
    "type2_pair_distribution",
    "drift_check",
    "sqrt_growth_experiment",
    # errors
    "PotentialError",
    "NonMonotoneBreakpoints",
    "SupportOutOfRange",
    "NonFiniteValue",
    "ComputationError",
    "KTooSmall",
    "NonRealK",
    "NonPositiveK",
    "OutOfClosedFormRange",
    "ZeroReflection",
    "Overflow",
    "NumericOverflow",
    "SpecMismatch",
    "WitnessNotFound",
]
