"""Source recovery for the heat equation with a mirrored diffusion term.

Reconstructs the time-independent source f(x) and the temperature field
u(x, t) of ``u_t - u_xx + eps*u_xx(-x, t) = f(x)`` on (-pi, pi) x (0, T)
from the initial and final profiles, for Dirichlet, Neumann, periodic
and antiperiodic boundary conditions, and cross-checks the result with
an independent Crank-Nicolson march.
"""

__version__ = "0.1.0"

from .basis import BcKind, Branch, ModeId, basis_eval, eigen_residual, eigenvalue
from .coefficients import (CoefficientSet, QuadratureRule, compatibility_check,
                           fourier_coefficient, third_derivative_coefficients)
from .expr import differentiate, evaluate, parse, reflect
from .oracle import Grid, evolve, round_trip_error, step_crank_nicolson
from .solver import (ProblemSpec, SeriesSolution, evaluate_f, evaluate_u,
                     pde_residual, solve, tail_estimate)
from .verify import VerificationReport, VerifyOptions, run_suite

__all__ = [
    "__version__",
    "BcKind", "Branch", "ModeId", "basis_eval", "eigen_residual", "eigenvalue",
    "CoefficientSet", "QuadratureRule", "compatibility_check",
    "fourier_coefficient", "third_derivative_coefficients",
    "differentiate", "evaluate", "parse", "reflect",
    "Grid", "evolve", "round_trip_error", "step_crank_nicolson",
    "ProblemSpec", "SeriesSolution", "evaluate_f", "evaluate_u",
    "pde_residual", "solve", "tail_estimate",
    "VerificationReport", "VerifyOptions", "run_suite",
]
