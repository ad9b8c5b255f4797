"""Horn-clause logic programming with bounded-quantifier ("for-loop") goals."""

from .engine import Machine, Solution, run_query, solve
from .errors import ExecutionError, ForlogError, ParseError
from .reader import parse_goal, parse_program
from .terms import Program
from .translate import check_equivalence, eliminate_foralls, pretty_print

__all__ = [
    "ExecutionError",
    "ForlogError",
    "Machine",
    "ParseError",
    "Program",
    "Solution",
    "check_equivalence",
    "eliminate_foralls",
    "parse_goal",
    "parse_program",
    "pretty_print",
    "run_query",
    "solve",
]
