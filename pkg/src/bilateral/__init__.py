"""Proof kernel and normaliser for bilateral classical natural deduction."""
from .syntax import (
    BOT, Atom, Compound, SignedFormula, atom, conj, degree, disj, imp, minus, neg, plus,
    star, subformulas,
)
from .kernel import (
    B, RULES, SYSTEMS, CheckReport, Hyp, Inf, KernelError, LabelSupply, SystemConfig,
    alpha_equivalent,
    Violation, check, open_assumptions, substitute_hypotheses,
)
from .analysis import (
    Rank, Redex, Segment, effective_degree, is_normal, maximal_occurrences, rank,
    segments, subformula_report,
)
from .normalizer import (
    InvariantError, StepRecord, Stuck, Trace, apply_permutative, apply_step, atomize_nc, normalize,
    reduce_ie, reduce_inc, reduce_re, reduce_rnc, select_redex, simplify,
)
from .textio import ParseError, SourceSpan, dumps, parse, pretty, trace_to_json

__all__ = [name for name in dir() if not name.startswith("_")]
