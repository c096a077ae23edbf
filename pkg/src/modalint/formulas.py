"""Modal formulas in negation normal form: parsing, printing, negation, queries.

All formula values are immutable; negation occurs only on atoms.  The surface
syntax admits ``~`` and ``->`` anywhere; parsing normalizes to NNF immediately,
so every ``Formula`` in the rest of the package is NNF by construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class ParseError(ValueError):
    """Malformed input text; carries the offset of the offending token."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class NegAtom(Formula):
    name: str


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    body: Formula


@dataclass(frozen=True)
class Dia(Formula):
    body: Formula


BOT = Bot()
TOP = Top()

_ATOM_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


def negate(f: Formula) -> Formula:
    """NNF negation; an involution on NNF formulas."""
    match f:
        case Bot():
            return TOP
        case Top():
            return BOT
        case Atom(name):
            return NegAtom(name)
        case NegAtom(name):
            return Atom(name)
        case And(l, r):
            return Or(negate(l), negate(r))
        case Or(l, r):
            return And(negate(l), negate(r))
        case Box(b):
            return Dia(negate(b))
        case Dia(b):
            return Box(negate(b))
    raise TypeError(f"not a formula: {f!r}")


def implies(f: Formula, g: Formula) -> Formula:
    """f -> g as NNF: the negation of f, disjoined with g."""
    return Or(negate(f), g)


def vars_of(f: Formula) -> frozenset[str]:
    """The set of atomic propositions occurring in f (also under negation)."""
    acc: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        match g:
            case Atom(name) | NegAtom(name):
                acc.add(name)
            case And(l, r) | Or(l, r):
                stack.append(l)
                stack.append(r)
            case Box(b) | Dia(b):
                stack.append(b)
    return frozenset(acc)


def modal_depth(f: Formula) -> int:
    """Maximum nesting of box/diamond; literals and constants have depth 0."""
    match f:
        case And(l, r) | Or(l, r):
            return max(modal_depth(l), modal_depth(r))
        case Box(b) | Dia(b):
            return 1 + modal_depth(b)
        case _:
            return 0


def is_literal(f: Formula) -> bool:
    return isinstance(f, (Atom, NegAtom))


def is_atomic(f: Formula) -> bool:
    """Literal or Boolean constant."""
    return isinstance(f, (Atom, NegAtom, Bot, Top))


# ---------------------------------------------------------------------------
# Lexer, shared by the formula, sequent, and multiformula parsers.

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<name>[a-z][a-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<op>\[\]|<>|->|&&|\|\||[~&|()\[\],;:.])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"true", "false"}


@dataclass(frozen=True)
class Token:
    kind: str  # 'name', 'int', or the operator text itself
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup == "ws":
            pos = m.end()
            continue
        value = m.group()
        kind = value if m.lastgroup == "op" else m.lastgroup
        tokens.append(Token(kind, value, pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.i + ahead, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.next()
        if tok.kind != kind:
            raise ParseError(f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return tok

    def at_formula_start(self) -> bool:
        return self.peek().kind in ("name", "~", "[]", "<>", "(")

    # Precedence: ~, [], <> bind tightest, then &, then |, then -> (right
    # associative).  Negation and implication are eliminated on the fly.
    def formula(self) -> Formula:
        return self._imp(positive=True)

    def _imp(self, positive: bool) -> Formula:
        left = self._or(positive)
        if self.peek().kind == "->":
            self.next()
            right = self._imp(positive)
            # under negation, f -> g was parsed as ~(f -> g) = f & ~g
            if positive:
                return Or(negate(left), right)
            return And(negate(left), right)
        return left

    def _or(self, positive: bool) -> Formula:
        out = self._and(positive)
        while self.peek().kind == "|":
            self.next()
            rhs = self._and(positive)
            out = Or(out, rhs) if positive else And(out, rhs)
        return out

    def _and(self, positive: bool) -> Formula:
        out = self._unary(positive)
        while self.peek().kind == "&":
            self.next()
            rhs = self._unary(positive)
            out = And(out, rhs) if positive else Or(out, rhs)
        return out

    def _unary(self, positive: bool) -> Formula:
        tok = self.peek()
        if tok.kind == "~":
            self.next()
            return self._unary(not positive)
        if tok.kind == "[]":
            self.next()
            body = self._unary(positive)
            return Box(body) if positive else Dia(body)
        if tok.kind == "<>":
            self.next()
            body = self._unary(positive)
            return Dia(body) if positive else Box(body)
        if tok.kind == "(":
            self.next()
            inner = self._imp(positive)
            self.expect(")")
            return inner
        if tok.kind == "name":
            self.next()
            if tok.text == "true":
                return TOP if positive else BOT
            if tok.text == "false":
                return BOT if positive else TOP
            return Atom(tok.text) if positive else NegAtom(tok.text)
        raise ParseError(f"expected a formula, found {tok.text or 'end of input'!r}", tok.pos)


def parse_formula(text: str) -> Formula:
    """Parse surface syntax into an NNF formula.

    Grammar: ``false``, ``true``, atoms ``[a-z][a-z0-9_]*``, ``~f``, ``f & g``,
    ``f | g``, ``f -> g``, ``[] f``, ``<> f``, parentheses.
    """
    p = _Parser(text)
    f = p.formula()
    tok = p.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input {tok.text!r}", tok.pos)
    return f


# ---------------------------------------------------------------------------
# Printing.  Round-trips with parse_formula; & binds tighter than |, both
# print left associatively, unary operators take the tightest scope.

_PREC_OR = 1
_PREC_AND = 2
_PREC_UNARY = 3


def _fmt(f: Formula, prec: int) -> str:
    match f:
        case Bot():
            return "false"
        case Top():
            return "true"
        case Atom(name):
            return name
        case NegAtom(name):
            return "~" + name
        case And(l, r):
            s = f"{_fmt(l, _PREC_AND)} & {_fmt(r, _PREC_AND + 1)}"
            return f"({s})" if prec > _PREC_AND else s
        case Or(l, r):
            s = f"{_fmt(l, _PREC_OR)} | {_fmt(r, _PREC_OR + 1)}"
            return f"({s})" if prec > _PREC_OR else s
        case Box(b):
            return f"[] {_fmt(b, _PREC_UNARY)}"
        case Dia(b):
            return f"<> {_fmt(b, _PREC_UNARY)}"
    raise TypeError(f"not a formula: {f!r}")


def print_formula(f: Formula) -> str:
    return _fmt(f, 0)


def or_all(fs: list[Formula]) -> Formula:
    """Left-associated disjunction; the empty disjunction is false."""
    if not fs:
        return BOT
    out = fs[0]
    for g in fs[1:]:
        out = Or(out, g)
    return out


def and_all(fs: list[Formula]) -> Formula:
    """Left-associated conjunction; the empty conjunction is true."""
    if not fs:
        return TOP
    out = fs[0]
    for g in fs[1:]:
        out = And(out, g)
    return out


def simplify_formula(f: Formula) -> Formula:
    """Bottom-up constant absorption, idempotence, and the rewrites
    dia-false -> false, box-true -> true.  Equivalence preserving."""
    match f:
        case And(l, r):
            l, r = simplify_formula(l), simplify_formula(r)
            if isinstance(l, Bot) or isinstance(r, Bot):
                return BOT
            if isinstance(l, Top):
                return r
            if isinstance(r, Top):
                return l
            if l == r:
                return l
            return And(l, r)
        case Or(l, r):
            l, r = simplify_formula(l), simplify_formula(r)
            if isinstance(l, Top) or isinstance(r, Top):
                return TOP
            if isinstance(l, Bot):
                return r
            if isinstance(r, Bot):
                return l
            if l == r:
                return l
            return Or(l, r)
        case Box(b):
            b = simplify_formula(b)
            return TOP if isinstance(b, Top) else Box(b)
        case Dia(b):
            b = simplify_formula(b)
            return BOT if isinstance(b, Bot) else Dia(b)
        case _:
            return f


def substitute_atom(f: Formula, name: str, value: bool) -> Formula:
    """Replace an atom by a Boolean constant, staying in NNF."""
    match f:
        case Atom(n) if n == name:
            return TOP if value else BOT
        case NegAtom(n) if n == name:
            return BOT if value else TOP
        case And(l, r):
            return And(substitute_atom(l, name, value), substitute_atom(r, name, value))
        case Or(l, r):
            return Or(substitute_atom(l, name, value), substitute_atom(r, name, value))
        case Box(b):
            return Box(substitute_atom(b, name, value))
        case Dia(b):
            return Dia(substitute_atom(b, name, value))
        case _:
            return f
