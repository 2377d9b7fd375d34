"""In-repo exact solving: simplex LP, branch and bound, and file export."""

from .branch_bound import MilpResult, SolveLimits, solve_bb
from .simplex import LpResult, SolverError, solve_lp
from .writer import export

__all__ = [
    "LpResult",
    "MilpResult",
    "SolveLimits",
    "SolverError",
    "export",
    "solve_bb",
    "solve_lp",
]
