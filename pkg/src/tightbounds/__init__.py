"""Tight multi type systems measuring head, leftmost-outermost, maximal and
linear head evaluation of lambda terms."""

from .derivations import (
    Derivation,
    DerivationError,
    DerivFlags,
    Judgement,
    Rule,
    build,
    check,
    classify_derivation,
    deriv_size,
    from_json,
    infer_indices,
    to_json,
)
from .fuzz import FuzzReport, run_fuzz
from .generators import FuzzConfig, Generator, generate_term
from .multitypes import (
    ABS,
    NEUTRAL,
    Arrow,
    Atom,
    Context,
    MultiSet,
    Polarity,
    ctx_restrict,
    ctx_union,
    is_tight,
    occurs,
    parse_type,
    type_size,
)
from .strategies import StepKind, StepRecord, Trace, evaluate, step, t_family
from .synthesis import (
    anti_substitute,
    check_unfolding,
    head_iso,
    mts_type_normal_form,
    subject_expand,
    subject_reduce,
    substitute_derivation,
    synthesize_tight,
    type_normal_form,
)
from .terms import (
    SystemTag,
    Term,
    classify,
    free_vars,
    parse,
    render,
    size,
    substitute,
    unfold,
)

__all__ = [
    "Derivation",
    "DerivationError",
    "DerivFlags",
    "Judgement",
    "Rule",
    "build",
    "check",
    "classify_derivation",
    "deriv_size",
    "from_json",
    "infer_indices",
    "to_json",
    "ABS",
    "NEUTRAL",
    "Arrow",
    "Atom",
    "Context",
    "MultiSet",
    "Polarity",
    "ctx_restrict",
    "ctx_union",
    "is_tight",
    "occurs",
    "parse_type",
    "type_size",
    "anti_substitute",
    "check_unfolding",
    "head_iso",
    "mts_type_normal_form",
    "subject_expand",
    "subject_reduce",
    "substitute_derivation",
    "synthesize_tight",
    "type_normal_form",
    "SystemTag",
    "Term",
    "classify",
    "free_vars",
    "parse",
    "render",
    "size",
    "substitute",
    "unfold",
    "FuzzReport",
    "run_fuzz",
    "FuzzConfig",
    "Generator",
    "generate_term",
    "StepKind",
    "StepRecord",
    "Trace",
    "evaluate",
    "step",
    "t_family",
]
