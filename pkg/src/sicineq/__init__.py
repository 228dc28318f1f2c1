"""Optimal state-independent noncontextuality inequalities, solved by linear
programming and certified in exact arithmetic."""

from .lp import Inequality, SolveReport, solve_optimal
from .scenario import Scenario, compatibility_graph, enumerate_contexts, observable_from_vector

__all__ = ["Inequality", "Scenario", "SolveReport", "compatibility_graph", "enumerate_contexts",
           "observable_from_vector", "solve_optimal"]
