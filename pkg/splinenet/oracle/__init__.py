"""
Oracle module - grid-based convex reference solver
"""
from splinenet.oracle.solver import (
    GridProblem,
    OracleSolution,
    build_dictionary,
    build_grid,
    kkt_violation,
    oracle_seminorm,
    soft_threshold,
    solve,
    to_spline,
)

__all__ = [
    "GridProblem",
    "OracleSolution",
    "build_dictionary",
    "build_grid",
    "kkt_violation",
    "oracle_seminorm",
    "soft_threshold",
    "solve",
    "to_spline",
]
