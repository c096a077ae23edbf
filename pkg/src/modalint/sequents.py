"""Nested sequents: trees of formula multisets with positional labels.

A label addresses a node as a sequence of naturals; the root is (1,) and the
i-th child of ``s`` is ``s + (i,)``.  Saturation tests implement the closure
conditions that block proof-search rules for K, D, and T.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .formulas import (
    BOT,
    And,
    Atom,
    Bot,
    Box,
    Dia,
    Formula,
    NegAtom,
    Or,
    ParseError,
    Top,
    _Parser,
    or_all,
    print_formula,
)

Label = tuple[int, ...]
ROOT: Label = (1,)

LOGICS = ("K", "D", "T")


@dataclass(frozen=True)
class NestedSequent:
    formulas: tuple[Formula, ...] = ()
    children: tuple["NestedSequent", ...] = ()


def format_label(s: Label) -> str:
    return ".".join(str(n) for n in s)


def parse_label(text: str) -> Label:
    try:
        parts = tuple(int(x) for x in text.split("."))
    except ValueError:
        raise ParseError(f"bad label {text!r}", 0) from None
    return parts


def node_at(g: NestedSequent, s: Label) -> NestedSequent:
    if not s or s[0] != 1:
        raise ValueError(f"unknown label {format_label(s)}")
    node = g
    for i in s[1:]:
        if i < 1 or i > len(node.children):
            raise ValueError(f"unknown label {format_label(s)}")
        node = node.children[i - 1]
    return node


def labels(g: NestedSequent) -> set[Label]:
    """All node labels of g; always contains (1,) and is prefix closed."""
    out: set[Label] = set()

    def walk(node: NestedSequent, s: Label) -> None:
        out.add(s)
        for i, child in enumerate(node.children, start=1):
            walk(child, s + (i,))

    walk(g, ROOT)
    return out


def items(g: NestedSequent) -> Iterator[tuple[Label, Formula]]:
    """Labeled formula occurrences in label order, preserving multiplicity."""

    def walk(node: NestedSequent, s: Label) -> Iterator[tuple[Label, Formula]]:
        for f in node.formulas:
            yield s, f
        for i, child in enumerate(node.children, start=1):
            yield from walk(child, s + (i,))

    return walk(g, ROOT)


def member(g: NestedSequent, s: Label, f: Formula) -> bool:
    try:
        return f in node_at(g, s).formulas
    except ValueError:
        return False


def _replace(g: NestedSequent, s: Label, new_node: NestedSequent) -> NestedSequent:
    if len(s) == 1:
        return new_node
    i = s[1] - 1
    child = _replace(g.children[i], s[1:], new_node)
    return NestedSequent(g.formulas, g.children[:i] + (child,) + g.children[i + 1 :])


def insert(g: NestedSequent, s: Label, f: Formula) -> NestedSequent:
    """Add f to the multiset at node s."""
    node = node_at(g, s)
    return _replace(g, s, NestedSequent(node.formulas + (f,), node.children))


def insert_new(g: NestedSequent, s: Label, f: Formula) -> NestedSequent:
    """Add f at node s unless already present (set-like add for Kleene'd rules)."""
    node = node_at(g, s)
    if f in node.formulas:
        return g
    return _replace(g, s, NestedSequent(node.formulas + (f,), node.children))


def new_child(
    g: NestedSequent, s: Label, formulas: tuple[Formula, ...] = ()
) -> tuple[NestedSequent, Label]:
    """Append a child node at s; its label is s*n for the smallest unused n."""
    node = node_at(g, s)
    child_label = s + (len(node.children) + 1,)
    updated = NestedSequent(node.formulas, node.children + (NestedSequent(formulas),))
    return _replace(g, s, updated), child_label


def interpret(g: NestedSequent) -> Formula:
    """The formula reading: disjunction of members and boxed child readings."""
    parts: list[Formula] = list(g.formulas)
    parts.extend(Box(interpret(child)) for child in g.children)
    return or_all(parts)


# ---------------------------------------------------------------------------
# Saturation.

# Rule priority drives deterministic proof search and interpolant
# construction: axioms first, then the invertible propositional rules, then
# the diamond rules, with the box rule (which grows the tree) last.
_PRIORITY = {"id": 0, "or": 1, "and": 1, "k": 2, "t": 2, "d": 2, "box": 3}


@dataclass(frozen=True)
class Redex:
    label: Label
    formula: Formula
    rule: str  # 'id', 'or', 'and', 'box', 'k', 'd', 't'
    target: Label | None = None  # bracket the k rule acts toward


@dataclass(frozen=True)
class SaturationReport:
    saturated: bool
    redexes: tuple[Redex, ...]


def _node_redexes(node: NestedSequent, s: Label, logic: str) -> Iterator[Redex]:
    fs = node.formulas
    n_children = len(node.children)
    for f in fs:
        match f:
            case Top():
                yield Redex(s, f, "id")
            case Atom(name):
                if NegAtom(name) in fs:
                    yield Redex(s, f, "id")
            case Or(l, r):
                if l not in fs or r not in fs:
                    yield Redex(s, f, "or")
            case And(l, r):
                if l not in fs and r not in fs:
                    yield Redex(s, f, "and")
            case Box(b):
                if not any(b in c.formulas for c in node.children):
                    yield Redex(s, f, "box")
            case Dia(b):
                for i, child in enumerate(node.children, start=1):
                    if b not in child.formulas:
                        yield Redex(s, f, "k", s + (i,))
                if logic == "D" and n_children == 0:
                    yield Redex(s, f, "d")
                elif logic == "T" and b not in fs:
                    yield Redex(s, f, "t")


def redexes(g: NestedSequent, logic: str) -> tuple[Redex, ...]:
    """All unsaturated principal formulas, in deterministic priority order."""
    if logic not in LOGICS:
        raise ValueError(f"unknown logic {logic!r}")
    found: list[Redex] = []

    def walk(node: NestedSequent, s: Label) -> None:
        found.extend(_node_redexes(node, s, logic))
        for i, child in enumerate(node.children, start=1):
            walk(child, s + (i,))

    walk(g, ROOT)
    found.sort(key=lambda r: _PRIORITY[r.rule])
    return tuple(found)


def saturation(g: NestedSequent, logic: str) -> SaturationReport:
    rs = redexes(g, logic)
    return SaturationReport(saturated=not rs, redexes=rs)


def is_saturated(g: NestedSequent, logic: str) -> bool:
    return not redexes(g, logic)


# ---------------------------------------------------------------------------
# Text syntax: comma separated formulas and bracketed children, for example
# "~p, <>q & <>p, [q]".  A bare "[]" followed by ',' or ']' or the end of the
# input is an empty child; otherwise it starts a box formula.


def _parse_node(p: _Parser) -> NestedSequent:
    formulas: list[Formula] = []
    children: list[NestedSequent] = []
    while True:
        tok = p.peek()
        if tok.kind == "[":
            p.next()
            children.append(_parse_node(p))
            p.expect("]")
        elif tok.kind == "[]" and p.peek(1).kind in (",", "]", "eof"):
            p.next()
            children.append(NestedSequent())
        elif p.at_formula_start():
            formulas.append(p.formula())
        elif tok.kind in (",", "]", "eof"):
            pass
        else:
            raise ParseError(f"unexpected {tok.text!r} in sequent", tok.pos)
        if p.peek().kind == ",":
            p.next()
            continue
        return NestedSequent(tuple(formulas), tuple(children))


def parse_sequent(text: str) -> NestedSequent:
    p = _Parser(text)
    g = _parse_node(p)
    tok = p.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input {tok.text!r}", tok.pos)
    return g


def print_sequent(g: NestedSequent) -> str:
    parts = [print_formula(f) for f in g.formulas]
    parts.extend(f"[{print_sequent(c)}]" for c in g.children)
    return ", ".join(parts)


def sequent_of(f: Formula) -> NestedSequent:
    return NestedSequent((f,))
