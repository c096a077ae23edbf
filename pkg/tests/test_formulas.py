import pytest
from hypothesis import given, settings, strategies as st

from modalint.formulas import (
    BOT,
    TOP,
    And,
    Atom,
    Box,
    Dia,
    NegAtom,
    Or,
    ParseError,
    implies,
    modal_depth,
    negate,
    parse_formula,
    print_formula,
    simplify_formula,
    substitute_atom,
    vars_of,
)
from modalint.models import enumerate_models, satisfies

atoms = st.sampled_from(["p", "q", "r"])
formulas = st.recursive(
    st.one_of(
        st.just(BOT),
        st.just(TOP),
        st.builds(Atom, atoms),
        st.builds(NegAtom, atoms),
    ),
    lambda children: st.one_of(
        st.builds(And, children, children),
        st.builds(Or, children, children),
        st.builds(Box, children),
        st.builds(Dia, children),
    ),
    max_leaves=12,
)


def test_parse_implication_normalizes_to_nnf():
    assert parse_formula("[]p -> p") == Or(Dia(NegAtom("p")), Atom("p"))


def test_parse_identity_atom():
    assert parse_formula("p") == Atom("p")


def test_parse_negated_conjunction_de_morgan():
    assert parse_formula("~(p & <>q)") == Or(NegAtom("p"), Box(NegAtom("q")))


def test_parse_precedence_and_associativity():
    assert parse_formula("p & q | r") == Or(And(Atom("p"), Atom("q")), Atom("r"))
    # implication is right associative
    assert parse_formula("p -> q -> r") == parse_formula("p -> (q -> r)")
    assert parse_formula("[]p & q") == And(Box(Atom("p")), Atom("q"))
    assert parse_formula("~~p") == Atom("p")
    assert parse_formula("~true") == BOT
    assert parse_formula("~[]p") == Dia(NegAtom("p"))


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse_formula("p & ")
    assert err.value.position == 4
    with pytest.raises(ParseError):
        parse_formula("p q")
    with pytest.raises(ParseError):
        parse_formula("(p")


def test_negate_examples():
    assert negate(Atom("p")) == NegAtom("p")
    assert negate(parse_formula("[]p | q")) == parse_formula("<>~p & ~q")
    assert negate(BOT) == TOP


def test_vars_examples():
    assert vars_of(parse_formula("p & <>~q")) == {"p", "q"}
    assert vars_of(TOP) == frozenset()
    assert vars_of(parse_formula("[]p | []~p")) == {"p"}


def test_modal_depth_examples():
    assert modal_depth(Atom("p")) == 0
    assert modal_depth(parse_formula("[](p | <>q)")) == 2
    assert modal_depth(parse_formula("<>p & []q")) == 1


@settings(max_examples=200, deadline=None)
@given(formulas)
def test_negate_involution(f):
    assert negate(negate(f)) == f


@settings(max_examples=200, deadline=None)
@given(formulas)
def test_print_parse_roundtrip(f):
    assert parse_formula(print_formula(f)) == f


@settings(max_examples=60, deadline=None)
@given(formulas)
def test_formula_and_negation_never_both_satisfied(f):
    names = sorted(vars_of(f))[:2]
    for model in enumerate_models("K", 2, set(names)):
        for w in model.worlds:
            assert not (satisfies(model, w, f) and satisfies(model, w, negate(f)))


@settings(max_examples=100, deadline=None)
@given(formulas)
def test_simplify_preserves_truth(f):
    g = simplify_formula(f)
    names = sorted(vars_of(f))[:2]
    for model in enumerate_models("K", 2, set(names)):
        for w in model.worlds:
            assert satisfies(model, w, f) == satisfies(model, w, g)


def test_implies_is_negation_plus_disjunction():
    assert implies(Atom("p"), Atom("q")) == Or(NegAtom("p"), Atom("q"))


def test_substitute_atom():
    f = parse_formula("p | []~p | q")
    assert substitute_atom(f, "p", True) == parse_formula("true | []false | q")
    assert substitute_atom(f, "p", False) == parse_formula("false | []true | q")
