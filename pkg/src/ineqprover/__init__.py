"""Prove real inequalities without expanding products of sums.

An additive module (exact Fourier-Motzkin elimination) and a multiplicative
module (positive-cone elimination) take turns deriving pairwise comparisons
between named subterms into a shared table until a contradiction or a
fixpoint; declared strictly monotone functions contribute as well.  All
arithmetic is exact rational arithmetic.
"""

from .blackboard import (REFUTED, RESOURCE_LIMIT, ROUND_CAP, SATURATED,
                         ProblemState, TraceStep, Verdict, prove_sequent,
                         refute, refute_hypotheses, run_round, separate_terms)
from .comm import CommAtom, ResourceLimitError, SignContradiction, UNIT, make_atom
from .monofun import MonoDecl
from .parsing import ParseError, ProblemFile, parse_expression, parse_problem
from .report import emit_report, report_data
from .terms import (App, Div, Neg, One, Pow, Prod, RawTerm, Scale, Sum,
                    TermBank, TermError, Var, combine, equal_terms,
                    evaluate, evaluate_normal, invert, negate, normalize,
                    pow_int, precedes, render, scale)

__all__ = [
    "REFUTED", "RESOURCE_LIMIT", "ROUND_CAP", "SATURATED",
    "ProblemState", "TraceStep", "Verdict",
    "prove_sequent", "refute", "refute_hypotheses", "run_round",
    "separate_terms",
    "CommAtom", "ResourceLimitError", "SignContradiction", "UNIT", "make_atom",
    "MonoDecl",
    "ParseError", "ProblemFile", "parse_expression", "parse_problem",
    "emit_report", "report_data",
    "App", "Div", "Neg", "One", "Pow", "Prod", "RawTerm", "Scale", "Sum",
    "TermBank", "TermError", "Var",
    "combine", "equal_terms", "evaluate", "evaluate_normal", "invert",
    "negate", "normalize", "pow_int", "precedes", "render", "scale",
]
