"""spinotto: an exact simulator of a two-spin quantum Otto engine that charges
a qubit battery through coherent flip-flop power strokes, with the full
diagnostic toolbox (work split, ergotropy, coherence, concurrence)."""

__version__ = "0.1.0"

from .diagnostics import (
    CorrelatorSet,
    ErgotropyReport,
    Polarization,
    concurrence,
    ergotropy,
    mean_energy,
    passive_state,
    pauli_correlators,
    polarization_vector,
    relative_entropy_of_coherence,
    von_neumann_entropy,
)
from .engine import (
    ConfigError,
    CycleRecord,
    EngineConfig,
    NoiseConfig,
    WorkBreakdown,
    closed_form_work,
    flip_flop_propagator,
    power_stroke,
    prepare_battery,
    prepare_cold_medium,
    prepare_hot_medium,
    reset_medium,
    run_single_cycle,
)
from .linalg import (
    DimensionError,
    EigenDecomposition,
    LinalgError,
    ValidationError,
    dagger,
    hermitian_eig,
    hermitian_function,
    kron,
    partial_trace,
    pauli,
    sqrtm_psd,
    trace,
    validate_density,
)
from .multicycle import (
    ComparisonResult,
    EngineTrace,
    compare_coherent_incoherent,
    dephase_battery,
    peak_advantage,
    run_engine,
    sweep,
)
from .scenario import (
    PRESETS,
    ScenarioError,
    ScenarioFile,
    config_from_dict,
    config_to_dict,
    load_scenario,
    parse_scenario,
    resolve_scenario,
)

__all__ = [
    "__version__",
    "CorrelatorSet",
    "ErgotropyReport",
    "Polarization",
    "concurrence",
    "ergotropy",
    "mean_energy",
    "passive_state",
    "pauli_correlators",
    "polarization_vector",
    "relative_entropy_of_coherence",
    "von_neumann_entropy",
    "ConfigError",
    "CycleRecord",
    "EngineConfig",
    "NoiseConfig",
    "WorkBreakdown",
    "closed_form_work",
    "flip_flop_propagator",
    "power_stroke",
    "prepare_battery",
    "prepare_cold_medium",
    "prepare_hot_medium",
    "reset_medium",
    "run_single_cycle",
    "DimensionError",
    "EigenDecomposition",
    "LinalgError",
    "ValidationError",
    "dagger",
    "hermitian_eig",
    "hermitian_function",
    "kron",
    "partial_trace",
    "pauli",
    "sqrtm_psd",
    "trace",
    "validate_density",
    "ComparisonResult",
    "EngineTrace",
    "compare_coherent_incoherent",
    "dephase_battery",
    "peak_advantage",
    "run_engine",
    "sweep",
    "PRESETS",
    "ScenarioError",
    "ScenarioFile",
    "config_from_dict",
    "config_to_dict",
    "load_scenario",
    "parse_scenario",
    "resolve_scenario",
]
