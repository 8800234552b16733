"""MILP representation, LP-format I/O, simplex, and branch-and-bound."""

from .branch_bound import solve_milp
from .lpfile import LpParseError, export_lp, import_lp
from .model import (
    Constraint,
    MilpError,
    MilpModel,
    NumericalBreakdown,
    Objective,
    SolveResult,
    SolverParams,
    Variable,
    build,
)
from .simplex import solve_lp

__all__ = [
    "Constraint",
    "LpParseError",
    "MilpError",
    "MilpModel",
    "NumericalBreakdown",
    "Objective",
    "SolveResult",
    "SolverParams",
    "Variable",
    "build",
    "export_lp",
    "import_lp",
    "solve_lp",
    "solve_milp",
]
