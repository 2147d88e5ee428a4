"""Exact pseudo-Boolean model counting with projection and incremental reuse."""

from .compiler import compile_constraint
from .counting import CountResult, CountTrace, count, validate_graded_trace
from .dd import AddManager, AddRef, mcs_order
from .formula import (Comparator, PBConstraint, PBFormula, ParseError, Term, VarPartition,
                      build_gaifman_graph, build_occurrence_graph, normalize, parse_constraint,
                      parse_formula, render)
from .incremental import Session
from .oracle import brute_count, brute_projected_count, gen_instance, gen_session

__all__ = [
    "AddManager", "AddRef", "Comparator", "CountResult", "CountTrace", "PBConstraint", "PBFormula",
    "ParseError", "Session", "Term", "VarPartition", "brute_count", "brute_projected_count",
    "build_gaifman_graph", "build_occurrence_graph", "compile_constraint", "count", "gen_instance",
    "gen_session", "mcs_order", "normalize", "parse_constraint", "parse_formula", "render",
    "validate_graded_trace",
]
