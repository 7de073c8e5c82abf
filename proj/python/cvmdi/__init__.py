"""CV-MDI-QKD secret key rate engine (C++ core with python bindings)."""

from ._core import (  # noqa: F401
    BoundarySide,
    CvmdiError,
    EvalOptions,
    FockAmplitudes,
    FrontierPoint,
    GainMode,
    GainSpec,
    KeyRateBreakdown,
    LinkBudget,
    OneWayChannel,
    OptBox,
    OptOptions,
    OptResult,
    ScanPoint,
    ScanResult,
    StateFamily,
    StateSpec,
    SymplecticPair,
    TracePoint,
    TwoModeCovariance,
    build_tmsc,
    clear_source_cache,
    effective_displacement,
    entropy_g,
    excess_noise_at,
    family_from_string,
    frontier,
    heterodyne_condition,
    holevo_bound,
    max_distance,
    max_distance_fixed,
    moments,
    mutual_information,
    one_way_reduce,
    optimal_parameter_trace,
    optimize_key_rate,
    propagate,
    resolve_cutoff,
    scan_variance,
    secret_key_rate,
    seed_cutoff,
    subtract_photon,
    symplectic_eigenvalues,
    symplectic_eigenvalues_generic,
    tmsv_covariance,
    transmissivity_from_distance,
    von_neumann_entropy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "1.0.0"
