"""Backward proof search for the nested calculi of K, D, and T.

Rules fire only on unsaturated principal formulas (Kleene'd rules with
embedded contraction), which makes the search terminate; a fuel guard turns
any violation of that argument into a hard error instead of silent
truncation.  Saturated leaves that are not axioms yield countermodels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .formulas import And, Dia, Formula, NegAtom, Or, Atom
from .models import Interpretation, KripkeModel, make_model
from .sequents import (
    Label,
    NestedSequent,
    Redex,
    format_label,
    insert_new,
    is_saturated,
    labels,
    new_child,
    print_sequent,
    redexes,
    sequent_of,
)


@dataclass(frozen=True)
class ProofTree:
    rule: str
    conclusion: NestedSequent
    premises: tuple["ProofTree", ...] = ()

    def to_text(self, indent: int = 0) -> str:
        lines = [f"{'  ' * indent}{self.rule}: {print_sequent(self.conclusion)}"]
        for premise in self.premises:
            lines.append(premise.to_text(indent + 1))
        return "\n".join(lines)


@dataclass(frozen=True)
class Derivable:
    tree: ProofTree


@dataclass(frozen=True)
class Refutable:
    witness: NestedSequent  # saturated sequent reached by the search


ProofOutcome = Union[Derivable, Refutable]

_FUEL = 2_000_000


class _Search:
    def __init__(self, logic: str):
        self.logic = logic
        self.fuel = _FUEL

    def run(self, g: NestedSequent) -> ProofOutcome:
        self.fuel -= 1
        if self.fuel <= 0:
            raise RuntimeError("proof search fuel exhausted; termination argument violated")
        rs = redexes(g, self.logic)
        if not rs:
            return Refutable(g)
        r = rs[0]
        if r.rule == "id":
            name = "id_top" if not isinstance(r.formula, Atom) else "id_p"
            return Derivable(ProofTree(name, g))
        return self._apply(g, r)

    def _apply(self, g: NestedSequent, r: Redex) -> ProofOutcome:
        s, f = r.label, r.formula
        if r.rule == "or":
            assert isinstance(f, Or)
            premise = insert_new(insert_new(g, s, f.left), s, f.right)
            return self._unary("or", g, premise)
        if r.rule == "and":
            assert isinstance(f, And)
            left = self.run(insert_new(g, s, f.left))
            if isinstance(left, Refutable):
                return left
            right = self.run(insert_new(g, s, f.right))
            if isinstance(right, Refutable):
                return right
            return Derivable(ProofTree("and", g, (left.tree, right.tree)))
        if r.rule == "k":
            assert isinstance(f, Dia) and r.target is not None
            premise = insert_new(g, r.target, f.body)
            return self._unary("k", g, premise)
        if r.rule == "t":
            assert isinstance(f, Dia)
            premise = insert_new(g, s, f.body)
            return self._unary("t", g, premise)
        if r.rule == "d":
            assert isinstance(f, Dia)
            premise, _ = new_child(g, s, (f.body,))
            return self._unary("d", g, premise)
        if r.rule == "box":
            premise, _ = new_child(g, s, (f.body,))
            return self._unary("box", g, premise)
        raise AssertionError(f"unhandled redex {r!r}")

    def _unary(self, rule: str, g: NestedSequent, premise: NestedSequent) -> ProofOutcome:
        outcome = self.run(premise)
        if isinstance(outcome, Refutable):
            return outcome
        return Derivable(ProofTree(rule, g, (outcome.tree,)))


def prove(g: NestedSequent, logic: str) -> ProofOutcome:
    """Decide derivability of a nested sequent; total on all inputs."""
    return _Search(logic).run(g)


def derivable(f: Formula, logic: str) -> bool:
    return isinstance(prove(sequent_of(f), logic), Derivable)


def countermodel(g: NestedSequent, logic: str) -> tuple[KripkeModel, Interpretation]:
    """Falsifying tree model for a saturated sequent.

    Worlds are the sequent nodes; the valuation makes every literal member
    false at its node, and the identity interpretation falsifies g."""
    if not is_saturated(g, logic):
        raise ValueError("countermodel requires a saturated sequent")
    ordered = sorted(labels(g), key=lambda s: (len(s), s))
    world_of = {s: i for i, s in enumerate(ordered)}
    rel = {
        (world_of[s[:-1]], world_of[s]) for s in ordered if len(s) > 1
    }
    if logic == "T":
        rel |= {(w, w) for w in world_of.values()}
    elif logic == "D":
        non_leaf = {s[:-1] for s in ordered if len(s) > 1}
        rel |= {(world_of[s], world_of[s]) for s in ordered if s not in non_leaf}
    val: dict[str, set[int]] = {}
    from .sequents import items

    for s, f in items(g):
        if isinstance(f, NegAtom):
            val.setdefault(f.name, set()).add(world_of[s])
        elif isinstance(f, Atom):
            val.setdefault(f.name, set())
    model = make_model(world_of.values(), rel, val, root=world_of[(1,)])
    return model, dict(world_of)


def format_countermodel(model: KripkeModel, interp: Interpretation) -> str:
    pairs = ", ".join(
        f"{format_label(s)} -> {w}" for s, w in sorted(interp.items())
    )
    return f"interpretation: {pairs}"
