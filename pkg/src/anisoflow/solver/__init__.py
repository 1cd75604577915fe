"""Time stepping, boundary handling, and translating-profile solvers."""

from .config import (
    ContactProblem,
    DirichletProblem,
    FlowState,
    IntervalProblem,
    Snapshot,
    SolverConfig,
    Trajectory,
    TranslatorResult,
    TRAJECTORY_COLUMNS,
)
from .flow import (
    advance,
    compatibilize,
    compatibility_residual,
    random_smooth_field,
    run_flow,
)
from .operator import (
    apply_operator,
    boundary_gradient,
    boundary_normal_derivative,
    boundary_tangential_derivative,
    contact_ghost_row,
    contact_residual,
    ghost_normal_derivative,
    one_sided_radial_derivative,
    operator_fields,
    operator_fields_1d,
)
from .translator import solve_dirichlet_profile, solve_translator

__all__ = [
    "ContactProblem", "DirichletProblem", "FlowState", "IntervalProblem",
    "Snapshot", "SolverConfig", "Trajectory", "TranslatorResult",
    "TRAJECTORY_COLUMNS",
    "advance", "compatibilize", "compatibility_residual",
    "random_smooth_field", "run_flow",
    "apply_operator", "boundary_gradient", "boundary_normal_derivative",
    "boundary_tangential_derivative", "contact_ghost_row", "contact_residual",
    "ghost_normal_derivative", "one_sided_radial_derivative",
    "operator_fields", "operator_fields_1d",
    "solve_dirichlet_profile", "solve_translator",
]
