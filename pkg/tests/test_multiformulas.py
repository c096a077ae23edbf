import random

import pytest

from modalint.formulas import BOT, TOP, Atom, Box, Dia, NegAtom, Or, parse_formula
from modalint.models import enumerate_models, treelike_interpretations
from modalint.multiformulas import (
    Lab,
    MAnd,
    MOr,
    UnsuitableInterpretation,
    form,
    meval,
    mlabels,
    parse_multiformula,
    print_multiformula,
    scnf_blocks,
    sdnf_blocks,
    simplify,
    to_scnf,
    to_sdnf,
)

L1 = (1,)
L11 = (1, 1)
L12 = (1, 2)


def meval_equivalent(m1, m2, label_set, max_worlds=3, atoms=("p", "q")):
    """Exhaustive equivalence of two multiformulas over tree models and all
    treelike interpretations of a prefix-closed label set."""
    for model in enumerate_models("K", max_worlds, set(atoms)):
        for interp in treelike_interpretations(set(label_set), model):
            if meval(model, interp, m1) != meval(model, interp, m2):
                return False
    return True


def random_multiformula(rng, label_pool, formula_pool, size):
    if size == 0:
        return Lab(rng.choice(label_pool), rng.choice(formula_pool))
    k = rng.randrange(size)
    left = random_multiformula(rng, label_pool, formula_pool, k)
    right = random_multiformula(rng, label_pool, formula_pool, size - 1 - k)
    return MAnd(left, right) if rng.random() < 0.5 else MOr(left, right)


def test_mlabels_examples():
    assert mlabels(MAnd(Lab(L1, Atom("p")), Lab(L11, Atom("q")))) == {L1, L11}
    assert mlabels(MOr(Lab(L1, BOT), Lab(L1, BOT))) == {L1}
    assert mlabels(Lab(L12, TOP)) == {L12}


def test_form_examples():
    assert form(MAnd(Lab(L1, Atom("p")), Lab(L1, Atom("q")))) == parse_formula("p & q")
    assert form(Lab(L1, Dia(Atom("q")))) == Dia(Atom("q"))
    assert form(MOr(Lab(L1, BOT), Lab(L1, BOT))) == parse_formula("false | false")


def test_meval_examples():
    model = next(iter(enumerate_models("K", 1, set())))
    interp = {L1: 0}
    assert meval(model, interp, Lab(L1, TOP))
    assert not meval(model, interp, Lab(L1, BOT))
    with pytest.raises(UnsuitableInterpretation):
        meval(model, interp, Lab(L11, TOP))


def test_meval_never_true_for_all_bot():
    m = MOr(MOr(Lab(L1, BOT), Lab(L11, BOT)), Lab(L12, BOT))
    for model in enumerate_models("K", 3, {"p"}):
        for interp in treelike_interpretations({L1, L11, L12}, model):
            assert not meval(model, interp, m)


def test_meval_single_label_matches_form():
    from modalint.models import satisfies

    m = MOr(Lab(L1, Atom("p")), Lab(L1, Box(Atom("q"))))
    for model in enumerate_models("K", 2, {"p", "q"}):
        for interp in treelike_interpretations({L1}, model):
            assert meval(model, interp, m) == satisfies(model, interp[L1], form(m))


def test_scnf_paper_example():
    m = MOr(Lab(L1, BOT), Lab(L1, BOT))
    label_set = frozenset({L1, L11, L12})
    blocks = scnf_blocks(m, label_set)
    assert blocks == [((L1, BOT), (L11, BOT), (L12, BOT))]
    scnf = to_scnf(m, label_set)
    assert print_multiformula(scnf) == "1: false || 1.1: false || 1.2: false"
    assert meval_equivalent(m, scnf, label_set)


def test_scnf_trivial():
    assert to_scnf(Lab(L1, Atom("p")), frozenset({L1})) == Lab(L1, Atom("p"))


def test_sdnf_derived_example():
    m = MOr(Lab(L1, Atom("p")), Lab(L1, Atom("q")))
    label_set = frozenset({L1, L11})
    sdnf = to_sdnf(m, label_set)
    expected = MOr(
        MAnd(Lab(L1, Atom("p")), Lab(L11, TOP)),
        MAnd(Lab(L1, Atom("q")), Lab(L11, TOP)),
    )
    assert sdnf == expected
    assert meval_equivalent(m, sdnf, label_set, max_worlds=2)


def test_normal_form_block_shape_and_equivalence():
    rng = random.Random(8)
    label_pool = [L1, L11, L12]
    formula_pool = [BOT, TOP, Atom("p"), NegAtom("p"), Atom("q"), Dia(Atom("q"))]
    label_set = frozenset(label_pool)
    for _ in range(120):
        m = random_multiformula(rng, label_pool, formula_pool, rng.randrange(4))
        for blocks in (scnf_blocks(m, label_set), sdnf_blocks(m, label_set)):
            for block in blocks:
                assert [lab for lab, _ in block] == sorted(label_set)
        assert meval_equivalent(m, to_scnf(m, label_set), label_set, max_worlds=2)
        assert meval_equivalent(m, to_sdnf(m, label_set), label_set, max_worlds=2)


def test_scnf_rejects_uncovered_labels():
    with pytest.raises(ValueError):
        to_scnf(Lab(L11, TOP), frozenset({L1}))


def test_simplify_examples():
    m = MOr(Lab(L1, Box(BOT)), Lab(L1, Box(BOT)))
    assert simplify(m) == Lab(L1, Box(BOT))
    m2 = MOr(Lab(L11, Atom("q")), Lab(L1, Dia(BOT)))
    assert simplify(m2) == Lab(L11, Atom("q"))
    m3 = MAnd(Lab(L1, Atom("p")), Lab(L1, TOP))
    assert simplify(m3) == Lab(L1, Atom("p"))


def test_simplify_absorption():
    m = MAnd(MOr(Lab(L11, Atom("q")), Lab(L1, Dia(Atom("q")))), Lab(L11, Atom("q")))
    assert simplify(m) == Lab(L11, Atom("q"))


def test_simplify_preserves_meval():
    rng = random.Random(4)
    label_pool = [L1, L11]
    formula_pool = [BOT, TOP, Atom("p"), NegAtom("q"), Box(Atom("p")), Dia(BOT)]
    for _ in range(150):
        m = random_multiformula(rng, label_pool, formula_pool, rng.randrange(5))
        s = simplify(m)
        assert meval_equivalent(m, s, frozenset(label_pool), max_worlds=2)


def test_multiformula_text_roundtrip():
    for text in (
        "1.1: q",
        "1: p && 1.1: q",
        "(1: p || 1: <>q) && 1.2: []false",
        "1: p & q || 1: r",
    ):
        m = parse_multiformula(text)
        assert parse_multiformula(print_multiformula(m)) == m
