import pytest

from dfmlcorr.reduction import (
    ChangeOfVariables, FormalInequality, InequalitySystem, NodeBudgetExceeded,
    StabilityConstraint, apply_rule, applicable_moves, canonical_key,
    classify, is_canonical_form, is_simple_sahlqvist, parse_formal_inequality,
    parse_inequality_system, reduce_search, system_for,
)
from dfmlcorr.syntax import SORT1, SORTD, SortedVar, parse_dfml, parse_sorted


def ineq(text):
    return parse_formal_inequality(text)


def system(text):
    return parse_inequality_system(text)


# -- rule applications ---------------------------------------------------------

def test_r4_box_t():
    sys = system_for(ineq("boxm P0'' <=1 P0''"))
    moves = {(r, s): out for r, s, out in applicable_moves(sys)}
    got = moves[("R4", SortedVar(0, SORT1))]
    assert canonical_key(got) == canonical_key(system("P0'' <=1 P0 | boxm P0 <=1 P0"))


def test_r52_needs_constraint():
    unconstrained = system_for(ineq("(diav P0)' <=d P0'"))
    assert apply_rule(unconstrained, "R5.2b", ("lhs", ())) is None
    constrained = system("P0'' <=1 P0 | (diav P0)' <=d P0'")
    got = apply_rule(constrained, "R5.2b", ("lhs", ()))
    assert got is not None
    assert str(got.main) == "boxv P0' <=d P0'"


def test_r6_then_r1_change_of_variables():
    sys = system("P0'' <=1 P0 | boxv P0' <=d P0'")
    after_r6 = apply_rule(sys, "R6", SortedVar(0, SORT1))
    assert after_r6 is not None
    assert after_r6.cvc == (ChangeOfVariables(SortedVar(1, SORTD), SortedVar(0, SORT1)),)
    assert str(after_r6.main) == "boxv P^1 <=d P^1"
    after_r1 = apply_rule(after_r6, "R1", 0)
    assert after_r1.stb == ()
    assert after_r1.cvc == after_r6.cvc


def test_r4_requires_uniformly_double_primed():
    sys = system_for(ineq("P0'' <=1 (diav P0)''"))  # one bare occurrence
    assert apply_rule(sys, "R4", SortedVar(0, SORT1)) is None


def test_r6_requires_uniformly_single_primed():
    sys = system_for(ineq("P0' <=d P0'''"))  # mixed priming depths
    assert apply_rule(sys, "R6", SortedVar(0, SORT1)) is None


def test_r8_shape():
    sys = system("P0'' <=1 P0, P1'' <=1 P1 | P0 odot P0 rspoon P1 <=1 P0 rspoon P1")
    got = apply_rule(sys, "R8", None)
    assert got is not None
    assert str(got.main) == "P0 <=1 P0 odot P0"


def test_r7a_residuation():
    sys = system("P0'' <=1 P0, P1'' <=1 P1 | P0 <=1 P1 rspoon P0"
                 )
    got = apply_rule(sys, "R7a", None)
    assert str(got.main) == "P1 odot P0 <=1 P0"


def test_inapplicable_is_a_value():
    sys = system_for(ineq("P0 <=1 P0"))
    assert apply_rule(sys, "R8", None) is None
    assert apply_rule(sys, "R3", None) is None


# -- simple Sahlqvist and canonical form ----------------------------------------

def test_simple_boxed_atom():
    assert is_simple_sahlqvist(ineq("boxm P0 <=1 P0"))


def test_not_simple_double_primed():
    assert not is_simple_sahlqvist(ineq("boxm P0'' <=1 P0''"))


def test_simple_tright():
    assert is_simple_sahlqvist(ineq("P0 tright P^1 <=d P0 tright (P0 tright P^1)"))


def test_simple_more_examples():
    assert is_simple_sahlqvist(ineq("boxv boxv P^1 <=d P^1"))
    assert is_simple_sahlqvist(ineq("boxm P0 <=1 diav P0"))
    assert is_simple_sahlqvist(ineq("diav diav P0 <=1 diav P0"))
    assert is_simple_sahlqvist(ineq("P^0 <=d tdown P1"))


def test_canonical_box_t():
    assert is_canonical_form(system("P0'' <=1 P0 | boxm P0 <=1 P0"))


def test_canonical_dia_t():
    assert is_canonical_form(system("P0'' <=1 P0 | P0 <=1 (diav P0)''"))


def test_not_canonical_negative_occurrence():
    sys = system("P0'' <=1 P0 | P0 cap (tdown P0)' <=1 bot")
    assert not is_canonical_form(sys)


def test_not_canonical_primed_constrained_variable():
    sys = system("P0'' <=1 P0 | boxv P0' <=d P0'")
    assert not is_canonical_form(sys)


# -- search ----------------------------------------------------------------------

def test_search_five_step_trace():
    """The dual thread of the diamond-4 sequent: four reduction steps plus a
    final R1 dropping the stability constraint left behind."""
    start = ineq("(diav P0'')' <=d (diav (diav P0'')'')'")
    found = reduce_search(start)
    assert found is not None
    final, trace = found
    assert [st.rule for st in trace] == ["R4", "R5.2b", "R5.2b", "R6", "R1"]
    assert canonical_key(final) == canonical_key(
        system("P^1 =d P0' | boxv P^1 <=d (diav (boxv P^1)')'"))


def test_search_not_reducible():
    start = ineq("(diav (diav P0'')'')'' <=1 (diav P0'')''")
    assert reduce_search(start) is None


def test_search_contraction():
    start = ineq("P0'' rspoon (P0'' rspoon P1'') <=1 P0'' rspoon P1''")
    final, trace = reduce_search(start)
    assert canonical_key(final) == canonical_key(system("P0'' <=1 P0 | P0 <=1 P0 odot P0"))


def test_budget_exceeded():
    start = ineq("(diav (diav P0'')'')'' <=1 (diav P0'')''")
    with pytest.raises(NodeBudgetExceeded):
        reduce_search(start, max_nodes=5)


def test_search_terminates_without_budget_on_corpus():
    from dfmlcorr.corpus import CORPUS
    for entry in CORPUS:
        classify(parse_dfml(entry.sequent), max_nodes=50_000)


# -- classify ---------------------------------------------------------------------

def test_classify_both_threads():
    for text in ("box p |- p", "p |- dia p"):
        cls = classify(parse_dfml(text))
        assert cls.sahlqvist
        assert any(r.reduced for r in cls.results if r.thread == "translation")
        assert any(r.reduced for r in cls.results if r.thread == "cotranslation")


def test_classify_cotranslation_only():
    cls = classify(parse_dfml("dia dia p |- dia p"))
    assert cls.sahlqvist
    assert not any(r.reduced for r in cls.results if r.thread == "translation")
    assert all(r.reduced for r in cls.results if r.thread == "cotranslation")


def test_classify_not_sahlqvist():
    cls = classify(parse_dfml("p /\\ neg p |- q \\/ neg q"))
    assert not cls.sahlqvist
    assert all(not r.reduced for r in cls.results)


def test_canonical_key_renaming_insensitive():
    a = system("P3'' <=1 P3 | boxm P3 <=1 P3")
    b = system("P0'' <=1 P0 | boxm P0 <=1 P0")
    assert canonical_key(a) == canonical_key(b)
    c = system("P0'' <=1 P0 | boxm P0 <=1 diav P0")
    assert canonical_key(a) != canonical_key(c)
