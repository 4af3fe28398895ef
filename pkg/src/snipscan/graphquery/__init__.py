"""Budgeted pattern matching over code property graphs."""

from .engine import (
    Budget, BudgetExhausted, DEFAULT_LADDER, DEFAULT_WALL_CLOCK_LIMIT,
    MatchResult, analyze_with_budget, run,
)
from .pattern import (
    And, Compare, Const, Exists, HasLabel, InPath, Not, NodePred, NotExists,
    Or, PathStep, Pattern, Prop, SeqInPath, ANY, IN, OUT, where_from_dict,
)

__all__ = [
    "ANY", "And", "Budget", "BudgetExhausted", "Compare", "Const",
    "DEFAULT_LADDER", "DEFAULT_WALL_CLOCK_LIMIT", "Exists", "HasLabel", "IN",
    "InPath", "MatchResult", "NodePred", "Not", "NotExists", "OUT", "Or",
    "PathStep", "Pattern", "Prop", "SeqInPath", "analyze_with_budget", "run",
    "where_from_dict",
]
