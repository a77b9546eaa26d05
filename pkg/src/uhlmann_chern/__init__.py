"""Thermal Chern integrals for parameterized Hamiltonian families.

The package computes pure-state (Berry / non-abelian) and thermal
(Uhlmann) connections and curvatures for small Hamiltonian families,
and integrates them into first- and second-order thermal Chern
numbers with cross-checked routes.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegenerateBand,
    DimensionMismatch,
    GapClosed,
    ManifoldMismatch,
    NonIntegerPlaquetteSum,
    NotMaximalCluster,
    ResolutionTooLowWarning,
    StepTooLarge,
    TruncationTooSmall,
    TruncationWeightWarning,
    UhlmannChernError,
    UnsupportedDirection,
    VanishingDenominatorWarning,
)
from .linalg import (
    DEGENERACY_TOL,
    SpectralDecomposition,
    commutator,
    eigh_batch,
    hermitian_eig,
    hermiticity_defect,
    psd_sqrt,
    unitary_exp,
)
from .models import (
    BETA_INF,
    GAMMA,
    MODEL_VARIANTS,
    PAULI,
    CoherentOscillator,
    FourBandGamma,
    Haldane,
    Manifold,
    ThermalState,
    TwoLevelSphere,
    gamma_anticommutation_residual,
    model_id,
    thermal_state,
    thermal_weights,
)
from .geometry import (
    ConnectionField,
    CurvatureComponents,
    berry_curvature,
    direction_pairs,
    projector_limit_curvature,
    thermal_trace_spectral,
    uhlmann_connection_spectral,
    uhlmann_connection_sqrt_fd,
    uhlmann_curvature,
    weighted_trace,
    wz_curvature,
)
from .chern import (
    GridSpec,
    IntegralResult,
    SweepResult,
    default_grid,
    first_thermal_uc,
    pure_chern_fhs,
    second_chern_pure,
    second_thermal_uc,
    temperature_sweep,
)

__all__ = [
    "BETA_INF",
    "ConfigError",
    "ConnectionField",
    "CoherentOscillator",
    "CurvatureComponents",
    "DEGENERACY_TOL",
    "DegenerateBand",
    "DimensionMismatch",
    "FourBandGamma",
    "GAMMA",
    "GapClosed",
    "GridSpec",
    "Haldane",
    "IntegralResult",
    "MODEL_VARIANTS",
    "Manifold",
    "ManifoldMismatch",
    "NonIntegerPlaquetteSum",
    "NotMaximalCluster",
    "PAULI",
    "ResolutionTooLowWarning",
    "SpectralDecomposition",
    "StepTooLarge",
    "SweepResult",
    "ThermalState",
    "TruncationTooSmall",
    "TruncationWeightWarning",
    "TwoLevelSphere",
    "UhlmannChernError",
    "UnsupportedDirection",
    "VanishingDenominatorWarning",
    "berry_curvature",
    "commutator",
    "default_grid",
    "direction_pairs",
    "eigh_batch",
    "first_thermal_uc",
    "gamma_anticommutation_residual",
    "hermitian_eig",
    "hermiticity_defect",
    "model_id",
    "projector_limit_curvature",
    "psd_sqrt",
    "pure_chern_fhs",
    "second_chern_pure",
    "second_thermal_uc",
    "temperature_sweep",
    "thermal_state",
    "thermal_trace_spectral",
    "thermal_weights",
    "uhlmann_connection_spectral",
    "uhlmann_connection_sqrt_fd",
    "uhlmann_curvature",
    "unitary_exp",
    "weighted_trace",
    "wz_curvature",
]
