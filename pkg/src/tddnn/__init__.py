"""Neumann-Neumann time-domain decomposition for parabolic optimal control.

Convergence factors per eigenmode in closed form, an exact per-mode iteration
engine, a finite-difference oracle and minimax tuning of the relaxation.
"""

from .closed_form import (
    EFPair,
    Equioscillation,
    IterationMatrix2x2,
    RhoLimits,
    convergence_factor,
    divergence_margin,
    ef_coefficients,
    iteration_matrix,
    rho_limits,
    rho_over,
    sweep_factor,
    theta_equioscillation,
    zero_eigenvalue_sum,
)
from .engine import (
    InterfaceState,
    IterationTrace,
    SingularStepError,
    SpectrumRunError,
    SubdomainSolution,
    run,
    run_spectrum,
    sweep,
)
from .oracle import DiscreteSolution, ModeData, discrete_sweep, monolithic_solve, residual_check
from .spectral import (
    CASE_A,
    CASE_B,
    ControlProblem,
    Mode,
    Spectrum,
    explicit_spectrum,
    laplacian_1d_spectrum,
    log_grid_spectrum,
    mode_params,
)
from .tuning import OptimizationError, ThetaOptimum, optimize_theta
from .variants import CONVERGENT, DIVERGENT, NINE, Variant

__version__ = "0.1.0"
