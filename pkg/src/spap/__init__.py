"""Maximum stable matchings for student-project allocation with lecturer preferences over projects."""

from .model import Instance, Matching, build_instance, parse_instance, parse_matching, read_instance
from .stability import build_envy_graph, eliminate_coalitions, find_blocking_pairs, find_coalition, is_stable
from .solvers import BudgetExceeded, OptimalResult, enumerate_stable, max_stable_oracle, solve_exact
from .approx import approx_three_halves, approx_two

__all__ = [
    "Instance", "Matching", "build_instance", "parse_instance", "parse_matching", "read_instance",
    "build_envy_graph", "eliminate_coalitions", "find_blocking_pairs", "find_coalition", "is_stable",
    "BudgetExceeded", "OptimalResult", "enumerate_stable", "max_stable_oracle", "solve_exact",
    "approx_three_halves", "approx_two",
]
