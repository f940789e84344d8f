"""Dissipative preparation of steady-state entanglement in coupled cavities."""

from .effective import (
    EffectiveCoefficients,
    EffectiveModel,
    closed_form_model,
    coefficients,
    gamma_eff,
    numerical_effective_model,
)
from .errors import (
    CaventError,
    ConvergenceError,
    DegenerateSteadyStateError,
    NumericsError,
    ParameterRegimeError,
    ValidationError,
)
from .lindblad import LindbladTerm, Trajectory, integrate, lindblad_rhs, steady_state
from .model import (
    SystemParams,
    atomic_projectors,
    bare_hamiltonian,
    beam_splitter_unitary,
    delocalized_hamiltonian,
    full_hamiltonian,
    lindblad_terms,
    random_ground_state,
)
from .operators import (
    DensityMatrix,
    Operator,
    annihilation,
    atomic_op,
    embed,
    kron,
    partial_trace,
)
from .rates import (
    OptimalSolution,
    ScalingResult,
    convergence_time,
    cooperativity,
    optimal_params,
    optimized_system_params,
    rate_fidelity,
    rates_for_cooperativity,
    robustness_grid,
    scaling_study,
    steady_state_fidelity,
)

__version__ = "0.1.0"
