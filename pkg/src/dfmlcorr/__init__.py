"""Sahlqvist correspondence for distribution-free modal logic.

The package decides whether a modal sequent reduces to canonical Sahlqvist
form over its two-sorted companion language and, when it does, computes the
local first-order correspondent; a finite-frame semantics module verifies
computed correspondents by brute force.
"""
from .syntax import (
    ParseError, Positivity, Sequent, SortError, parse_dfml, parse_fo,
    parse_sorted, parse_sorted_sequent, positive_occurrences, print_formula,
)
from .translation import (
    second_order_translation, standard_translation, translate_bullet,
    translate_circle, translate_sequent,
)
from .reduction import (
    Classification, FormalInequality, InequalitySystem, NodeBudgetExceeded,
    apply_rule, classify, is_canonical_form, is_simple_sahlqvist,
    reduce_search,
)
from .correspondence import (
    Correspondent, compute_correspondent, guarded_translation,
    minimal_instantiation, simplify_f3, t_invariance,
)
from .semantics import (
    FiniteFrame, FrameSizeError, FrameValidationError, correspondence_oracle,
    eval_fo, kripke_frame, load_frame, local_validity, model_check_dfml,
    model_check_sorted,
)

__all__ = [
    "Classification", "Correspondent", "FiniteFrame", "FormalInequality",
    "FrameSizeError", "FrameValidationError", "InequalitySystem",
    "NodeBudgetExceeded", "ParseError", "Positivity", "Sequent", "SortError",
    "apply_rule", "classify", "compute_correspondent",
    "correspondence_oracle", "eval_fo", "guarded_translation",
    "is_canonical_form", "is_simple_sahlqvist", "kripke_frame", "load_frame",
    "local_validity", "minimal_instantiation", "model_check_dfml",
    "model_check_sorted", "parse_dfml", "parse_fo", "parse_sorted",
    "parse_sorted_sequent", "positive_occurrences", "print_formula",
    "reduce_search",
    "second_order_translation", "simplify_f3", "standard_translation",
    "t_invariance", "translate_bullet", "translate_circle",
    "translate_sequent",
]

__version__ = "0.1.0"
