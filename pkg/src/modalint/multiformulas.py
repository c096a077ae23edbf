"""Multiformulas: label-tagged formulas under meta conjunction/disjunction.

These are the interpolant values.  ``&&`` and ``||`` in the text syntax are
the meta connectives; ``form`` erases labels back into a plain formula.  The
structured normal forms (SDNF/SCNF) put exactly one labeled formula per label
in every block, which the interpolant construction relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import (
    BOT,
    TOP,
    And,
    Bot,
    Formula,
    Or,
    ParseError,
    Top,
    _Parser,
    and_all,
    or_all,
    print_formula,
    simplify_formula,
)
from .sequents import Label, format_label


class UnsuitableInterpretation(ValueError):
    pass


@dataclass(frozen=True)
class Multiformula:
    pass


@dataclass(frozen=True)
class Lab(Multiformula):
    label: Label
    formula: Formula


@dataclass(frozen=True)
class MAnd(Multiformula):
    left: Multiformula
    right: Multiformula


@dataclass(frozen=True)
class MOr(Multiformula):
    left: Multiformula
    right: Multiformula


def mlabels(m: Multiformula) -> frozenset[Label]:
    match m:
        case Lab(label, _):
            return frozenset((label,))
        case MAnd(l, r) | MOr(l, r):
            return mlabels(l) | mlabels(r)
    raise TypeError(f"not a multiformula: {m!r}")


def form(m: Multiformula) -> Formula:
    """Erase labels, mapping the meta connectives to plain ones."""
    match m:
        case Lab(_, f):
            return f
        case MAnd(l, r):
            return And(form(l), form(r))
        case MOr(l, r):
            return Or(form(l), form(r))
    raise TypeError(f"not a multiformula: {m!r}")


def mvars(m: Multiformula) -> frozenset[str]:
    from .formulas import vars_of

    return vars_of(form(m))


def meval(model, interp: dict[Label, int], m: Multiformula) -> bool:
    """Truth of a multiformula under a multiworld interpretation."""
    from .models import satisfies

    match m:
        case Lab(label, f):
            if label not in interp:
                raise UnsuitableInterpretation(
                    f"interpretation lacks label {format_label(label)}"
                )
            return satisfies(model, interp[label], f)
        case MAnd(l, r):
            return meval(model, interp, l) and meval(model, interp, r)
        case MOr(l, r):
            return meval(model, interp, l) or meval(model, interp, r)
    raise TypeError(f"not a multiformula: {m!r}")


def mor_all(ms: list[Multiformula]) -> Multiformula:
    """Left-associated meta disjunction; empty defaults to 1: false."""
    if not ms:
        return Lab((1,), BOT)
    out = ms[0]
    for x in ms[1:]:
        out = MOr(out, x)
    return out


def mand_all(ms: list[Multiformula]) -> Multiformula:
    if not ms:
        return Lab((1,), TOP)
    out = ms[0]
    for x in ms[1:]:
        out = MAnd(out, x)
    return out


# ---------------------------------------------------------------------------
# Structured normal forms.  A block maps each label of the target label set
# to one formula; SCNF blocks are read disjunctively and padded with bottom,
# SDNF blocks conjunctively and padded with top (the semantically neutral
# elements for the respective reading).

Block = tuple[tuple[Label, Formula], ...]


def _distribute(m: Multiformula, conjunctive: bool) -> list[list[tuple[Label, Formula]]]:
    match m:
        case Lab(label, f):
            return [[(label, f)]]
        case MAnd(l, r):
            if conjunctive:
                return _distribute(l, True) + _distribute(r, True)
            return [
                a + b for a in _distribute(l, False) for b in _distribute(r, False)
            ]
        case MOr(l, r):
            if conjunctive:
                return [
                    a + b for a in _distribute(l, True) for b in _distribute(r, True)
                ]
            return _distribute(l, False) + _distribute(r, False)
    raise TypeError(f"not a multiformula: {m!r}")


def _normalize_block(
    parts: list[tuple[Label, Formula]], label_set: frozenset[Label], conjunctive: bool
) -> Block:
    merged: dict[Label, list[Formula]] = {}
    for label, f in parts:
        fs = merged.setdefault(label, [])
        if f not in fs:
            fs.append(f)
    combine = or_all if conjunctive else and_all
    padding = BOT if conjunctive else TOP
    out = []
    for label in sorted(label_set):
        fs = merged.get(label)
        if fs is None:
            out.append((label, padding))
        elif len(fs) == 1:
            out.append((label, fs[0]))
        else:
            out.append((label, simplify_formula(combine(fs))))
    return tuple(out)


def scnf_blocks(m: Multiformula, label_set: frozenset[Label]) -> list[Block]:
    """Conjunction of disjunctive blocks, one formula per label per block."""
    if not mlabels(m) <= label_set:
        raise ValueError("label set does not cover the multiformula")
    blocks = [
        _normalize_block(clause, label_set, conjunctive=True)
        for clause in _distribute(m, conjunctive=True)
    ]
    seen: set[Block] = set()
    unique = []
    for b in blocks:
        if b not in seen:
            seen.add(b)
            unique.append(b)
    return unique


def sdnf_blocks(m: Multiformula, label_set: frozenset[Label]) -> list[Block]:
    """Disjunction of conjunctive blocks, one formula per label per block."""
    if not mlabels(m) <= label_set:
        raise ValueError("label set does not cover the multiformula")
    blocks = [
        _normalize_block(clause, label_set, conjunctive=False)
        for clause in _distribute(m, conjunctive=False)
    ]
    seen: set[Block] = set()
    unique = []
    for b in blocks:
        if b not in seen:
            seen.add(b)
            unique.append(b)
    return unique


def to_scnf(m: Multiformula, label_set: frozenset[Label]) -> Multiformula:
    return mand_all(
        [mor_all([Lab(s, f) for s, f in block]) for block in scnf_blocks(m, label_set)]
    )


def to_sdnf(m: Multiformula, label_set: frozenset[Label]) -> Multiformula:
    return mor_all(
        [mand_all([Lab(s, f) for s, f in block]) for block in sdnf_blocks(m, label_set)]
    )


# ---------------------------------------------------------------------------
# Best-effort simplification: truth preserving on every suitable
# interpretation, but not canonical, so interpolant comparisons elsewhere are
# semantic, never syntactic.


def _is_true(m: Multiformula) -> bool:
    return isinstance(m, Lab) and isinstance(m.formula, Top)


def _is_false(m: Multiformula) -> bool:
    return isinstance(m, Lab) and isinstance(m.formula, Bot)


def _disjunct_of(whole: Multiformula, part: Multiformula) -> bool:
    # part appears among whole's top-level disjuncts, so whole && part = part
    if whole == part:
        return True
    if isinstance(whole, MOr):
        return _disjunct_of(whole.left, part) or _disjunct_of(whole.right, part)
    return False


def _conjunct_of(whole: Multiformula, part: Multiformula) -> bool:
    if whole == part:
        return True
    if isinstance(whole, MAnd):
        return _conjunct_of(whole.left, part) or _conjunct_of(whole.right, part)
    return False


def simplify(m: Multiformula) -> Multiformula:
    match m:
        case Lab(label, f):
            return Lab(label, simplify_formula(f))
        case MAnd(l, r):
            l, r = simplify(l), simplify(r)
            if _is_false(l):
                return l
            if _is_false(r):
                return r
            if _is_true(l):
                return r
            if _is_true(r):
                return l
            if l == r:
                return l
            if isinstance(l, MOr) and _disjunct_of(l, r):
                return r
            if isinstance(r, MOr) and _disjunct_of(r, l):
                return l
            if isinstance(l, Lab) and isinstance(r, Lab) and l.label == r.label:
                return Lab(l.label, simplify_formula(And(l.formula, r.formula)))
            return MAnd(l, r)
        case MOr(l, r):
            l, r = simplify(l), simplify(r)
            if _is_true(l):
                return l
            if _is_true(r):
                return r
            if _is_false(l):
                return r
            if _is_false(r):
                return l
            if l == r:
                return l
            if isinstance(l, MAnd) and _absorbs(l, r):
                return r
            if isinstance(r, MAnd) and _absorbs(r, l):
                return l
            if isinstance(l, Lab) and isinstance(r, Lab) and l.label == r.label:
                return Lab(l.label, simplify_formula(Or(l.formula, r.formula)))
            return MOr(l, r)
    raise TypeError(f"not a multiformula: {m!r}")


# ---------------------------------------------------------------------------
# Text syntax: "1.1: q && (1: p || 1: <>q)".  && binds tighter than ||; the
# formula after a label extends as far as formula syntax allows.


def _parse_matom(p: _Parser) -> Multiformula:
    tok = p.peek()
    if tok.kind == "(":
        p.next()
        inner = _parse_mor(p)
        p.expect(")")
        return inner
    if tok.kind == "int":
        parts = [int(p.next().text)]
        while p.peek().kind == ".":
            p.next()
            parts.append(int(p.expect("int").text))
        p.expect(":")
        return Lab(tuple(parts), p.formula())
    raise ParseError(f"expected a labeled formula, found {tok.text!r}", tok.pos)


def _parse_mand(p: _Parser) -> Multiformula:
    out = _parse_matom(p)
    while p.peek().kind == "&&":
        p.next()
        out = MAnd(out, _parse_matom(p))
    return out


def _parse_mor(p: _Parser) -> Multiformula:
    out = _parse_mand(p)
    while p.peek().kind == "||":
        p.next()
        out = MOr(out, _parse_mand(p))
    return out


def parse_multiformula(text: str) -> Multiformula:
    p = _Parser(text)
    m = _parse_mor(p)
    tok = p.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input {tok.text!r}", tok.pos)
    return m


def print_multiformula(m: Multiformula) -> str:
    match m:
        case Lab(label, f):
            return f"{format_label(label)}: {print_formula(f)}"
        case MAnd(l, r):
            ls = print_multiformula(l)
            rs = print_multiformula(r)
            if isinstance(l, MOr):
                ls = f"({ls})"
            if isinstance(r, (MOr, MAnd)):
                rs = f"({rs})"
            return f"{ls} && {rs}"
        case MOr(l, r):
            ls = print_multiformula(l)
            rs = print_multiformula(r)
            if isinstance(r, MOr):
                rs = f"({rs})"
            return f"{ls} || {rs}"
    raise TypeError(f"not a multiformula: {m!r}")
