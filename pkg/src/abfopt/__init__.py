"""Accelerated backward-forward methods for composite convex minimization.

Solves min F(x) = f(x) + g(x) with smooth convex f and prox-friendly g.
Provides the backward-forward iteration with Nesterov-type momentum, its
linearly convergent strongly convex variant, forward-backward (FISTA)
baselines, and a diagnostics layer that evaluates the convergence
certificates of each method per iteration.
"""

from .diagnostics import (
    RunContext,
    TrajectoryRecord,
    bound_thm_convex,
    bound_thm_sc,
    convex_energy,
    fixed_point_residuals,
    gradient_gap,
    prox_descent_check,
    sc_energy,
    subgradient_gap,
    trend_checks,
    verify_trajectory,
    write_trajectory_csv,
)
from .errors import (
    CertificateError,
    ConfigurationError,
    DivergenceError,
    UnconvergedError,
)
from .problem import (
    LeastSquaresObjective,
    ProblemInstance,
    QuadraticObjective,
    ReferenceSolution,
    check_gradient,
    instance_from_descriptor,
    make_l1_quadratic,
    make_lasso,
    make_quadratic,
    reference_solve,
)
from .prox import (
    BoxRegularizer,
    L1Regularizer,
    SquaredL2Regularizer,
    ZeroRegularizer,
    prox_box,
    prox_l1,
    prox_squared_l2,
    prox_zero,
)
from .schedule import (
    ConvexSchedule,
    StronglyConvexSchedule,
    gamma_next,
    lambda_from_t,
    lambda_nesterov,
    next_t,
)
from .solvers import (
    RunConfig,
    Trajectory,
    abf_init,
    abf_sc_init,
    abf_sc_step,
    abf_step,
    fista_init,
    fista_sc_step,
    fista_step,
    pg_init,
    pg_step,
    run,
)

__version__ = "0.1.0"

__all__ = [
    "BoxRegularizer",
    "CertificateError",
    "ConfigurationError",
    "ConvexSchedule",
    "DivergenceError",
    "L1Regularizer",
    "LeastSquaresObjective",
    "ProblemInstance",
    "QuadraticObjective",
    "ReferenceSolution",
    "RunConfig",
    "RunContext",
    "SquaredL2Regularizer",
    "StronglyConvexSchedule",
    "Trajectory",
    "TrajectoryRecord",
    "UnconvergedError",
    "ZeroRegularizer",
    "abf_init",
    "abf_sc_init",
    "abf_sc_step",
    "abf_step",
    "bound_thm_convex",
    "bound_thm_sc",
    "check_gradient",
    "convex_energy",
    "fista_init",
    "fista_sc_step",
    "fista_step",
    "fixed_point_residuals",
    "gamma_next",
    "gradient_gap",
    "instance_from_descriptor",
    "lambda_from_t",
    "lambda_nesterov",
    "make_l1_quadratic",
    "make_lasso",
    "make_quadratic",
    "next_t",
    "pg_init",
    "pg_step",
    "prox_box",
    "prox_descent_check",
    "prox_l1",
    "prox_squared_l2",
    "prox_zero",
    "reference_solve",
    "run",
    "sc_energy",
    "subgradient_gap",
    "trend_checks",
    "verify_trajectory",
    "write_trajectory_csv",
]
