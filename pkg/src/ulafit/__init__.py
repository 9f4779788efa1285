"""Sparse linear array design from uniform sub-arrays.

Geometry generators, difference-coarray calculus, mutual-coupling
analysis, and a coarray-MUSIC Monte-Carlo harness.
"""

__version__ = "0.1.0"

from .geometry import (
    DesignParams,
    InvalidGeometryError,
    SparseArray,
    SubUla,
    coprime,
    design_j_3bl,
    design_j_4bl,
    dual,
    nested,
    optimal_params_3bl,
    optimal_params_4bl,
    uf3bl,
    uf4bl,
)
from .coarray import (
    CoarrayDecomposition,
    CoarrayReport,
    LagPolynomial,
    RangePartition,
    SearchBudgetExceededError,
    decompose,
    idca,
    lower_bound_udof,
    partition,
    report,
    sdca,
    search_gaps,
    tilde_plus,
    tilde_times,
    weight_function,
)
from .coupling import CouplingModel, coupling_leakage, coupling_matrix
from .doa import (
    MusicResult,
    Scenario,
    TrialStats,
    coarray_vector,
    default_grid,
    estimate_from_covariance,
    exact_covariance,
    music_spectrum,
    rmse_stats,
    run_trials,
    sample_covariance,
    spatial_smoothing,
    steering_matrix,
    synthesize,
    trial_rng,
)

__all__ = [name for name in dir() if not name.startswith("_")]
