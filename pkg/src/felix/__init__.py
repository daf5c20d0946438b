"""Agents whose happiness blends their own payoff with their neighbors' happiness."""

from .core import (
    Q_MAX,
    ConstraintError,
    HappinessOperator,
    HappinessSolution,
    ProsocialityState,
    SolverError,
    generalized_gradient,
    generalized_gradients,
    generalized_weights,
    reciprocity_matrix,
    selective_gradient,
    selective_gradients,
    solve_happiness,
)
from .graph import SocialGraph, parse_edgelist, read_edgelist, write_edgelist
from .netgen import GraphSpec, make_complete, make_er

__version__ = "0.1.0"

__all__ = [
    "Q_MAX", "ConstraintError", "GraphSpec", "HappinessOperator", "HappinessSolution",
    "ProsocialityState", "SocialGraph", "SolverError", "generalized_gradient",
    "generalized_gradients", "generalized_weights", "make_complete", "make_er",
    "parse_edgelist", "read_edgelist", "reciprocity_matrix", "selective_gradient",
    "selective_gradients", "solve_happiness", "write_edgelist", "__version__",
]
