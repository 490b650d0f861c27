"""Vertex cover by disjoint paths of order at least five."""

from .exact import BudgetExceeded, SearchBudget, exact_opt, exact_value, trunk_opt
from .graph import (Graph, ParseError, Solution, SolutionError, check_solution,
                    connected_components, parse_graph, serialize_graph, validate_solution)
from .matching import certify_maximum, maximum_matching
from .pipeline import AlgoConfig, Trace, ratio_holds, solve, solve_with_trace

__all__ = [
    "AlgoConfig", "BudgetExceeded", "Graph", "ParseError", "SearchBudget", "Solution",
    "SolutionError", "Trace", "certify_maximum", "check_solution", "connected_components",
    "exact_opt", "exact_value", "maximum_matching", "parse_graph", "ratio_holds",
    "serialize_graph", "solve", "solve_with_trace", "trunk_opt", "validate_solution",
]
