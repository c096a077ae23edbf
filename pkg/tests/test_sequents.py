import pytest

from modalint.formulas import Atom, Box, Dia, NegAtom, parse_formula, print_formula
from modalint.models import enumerate_models, satisfies
from modalint.sequents import (
    NestedSequent,
    insert,
    interpret,
    is_saturated,
    labels,
    member,
    new_child,
    parse_sequent,
    print_sequent,
    saturation,
    sequent_of,
)

EX1 = parse_sequent("f, [p, s], [~p, f, [x]]")


def formulas_equivalent(f, g, max_worlds=3):
    names = {a for a in sorted(set(list("pq")))}
    for model in enumerate_models("K", max_worlds, {"p", "q"}):
        for w in model.worlds:
            if satisfies(model, w, f) != satisfies(model, w, g):
                return False
    return True


def test_labels_example():
    assert labels(EX1) == {(1,), (1, 1), (1, 2), (1, 2, 1)}


def test_labels_trivial():
    assert labels(NestedSequent((Atom("p"),))) == {(1,)}
    assert labels(parse_sequent("[<>p]")) == {(1,), (1, 1)}


def test_member_example():
    assert member(EX1, (1, 2, 1), Atom("x"))
    assert not member(EX1, (1, 2), Atom("x"))
    assert not member(NestedSequent((Atom("p"),)), (1,), Atom("q"))


def test_interpret_examples():
    assert interpret(parse_sequent("p")) == Atom("p")
    assert interpret(parse_sequent("[q]")) == Box(Atom("q"))
    # derived case, checked against the semantic reading
    g = parse_sequent("p, [q], []")
    assert formulas_equivalent(interpret(g), parse_formula("p | []q | []false"))
    assert print_formula(interpret(g)) == "p | [] q | [] false"


def test_insert_and_new_child():
    g = NestedSequent((Atom("p"),))
    g2 = insert(g, (1,), Atom("q"))
    assert g2.formulas == (Atom("p"), Atom("q"))
    g3, lab = new_child(g, (1,))
    assert lab == (1, 1)
    g4, lab4 = new_child(EX1, (1,))
    assert lab4 == (1, 3)
    with pytest.raises(ValueError):
        insert(g, (1, 5), Atom("q"))


def test_saturation_diamond_examples():
    g = parse_sequent("[<>f]")
    assert saturation(g, "K").saturated
    rep_d = saturation(g, "D")
    assert not rep_d.saturated
    assert rep_d.redexes[0].rule == "d"
    assert rep_d.redexes[0].label == (1, 1)
    assert rep_d.redexes[0].formula == Dia(Atom("f"))
    rep_t = saturation(g, "T")
    assert not rep_t.saturated
    assert rep_t.redexes[0].rule == "t"


def test_saturation_id_clash():
    rep = saturation(parse_sequent("p, ~p"), "K")
    assert not rep.saturated
    assert rep.redexes[0].rule == "id"
    assert not saturation(parse_sequent("true"), "K").saturated


def test_saturation_compound_clauses():
    assert not saturation(parse_sequent("p | q"), "K").saturated
    assert saturation(parse_sequent("p | q, p, q"), "K").saturated
    assert saturation(parse_sequent("p & q, p"), "K").saturated
    assert not saturation(parse_sequent("[]p"), "K").saturated
    assert saturation(parse_sequent("[]p, [p]"), "K").saturated
    # k clause: diamond must be saturated w.r.t. every child
    assert not saturation(parse_sequent("<>p, [q]"), "K").saturated
    assert saturation(parse_sequent("<>p, [q, p]"), "K").saturated


def test_saturation_stronger_logics_imply_k():
    corpus = [
        "p, ~q | p",
        "<>p, [p]",
        "[]q, [q], <>q",
        "p & q, q, [<>p, p]",
    ]
    for text in corpus:
        g = parse_sequent(text)
        for logic in ("D", "T"):
            if is_saturated(g, logic):
                assert is_saturated(g, "K")


def test_parse_print_roundtrip():
    for text in ("~p, <>q & <>p, [q]", "p", "[], p", "[[q]], <>p"):
        g = parse_sequent(text)
        assert parse_sequent(print_sequent(g)) == g


def test_empty_child_vs_box_token():
    g = parse_sequent("[]")
    assert g == NestedSequent((), (NestedSequent(),))
    g2 = parse_sequent("[]p")
    assert g2 == NestedSequent((Box(Atom("p")),))
    g3 = parse_sequent("[], []p")
    assert g3.formulas == (Box(Atom("p")),)
    assert len(g3.children) == 1


def test_sequent_of():
    assert sequent_of(Atom("p")) == NestedSequent((Atom("p"),))
