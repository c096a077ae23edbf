"""S5 via hypersequents: decision procedure and uniform interpolation.

A hypersequent is a sequence of formula multisets read as boxed disjunctions
over a single cluster (a model with the total relation).  Interpolation is
restricted to inputs of modal depth at most one: stripping the single layer
of modalities leaves propositional formulas, whose uniform interpolants are
computed by substitution, which keeps the recursion from interfering with
itself across worlds of the cluster.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Union

from .formulas import (
    BOT,
    TOP,
    And,
    Atom,
    Box,
    Dia,
    Formula,
    NegAtom,
    Or,
    Top,
    ParseError,
    _Parser,
    and_all,
    is_literal,
    modal_depth,
    negate,
    or_all,
    print_formula,
    simplify_formula,
    substitute_atom,
    vars_of,
)
from .models import Interpretation, KripkeModel, make_model, satisfies, with_valuation
from .multiformulas import (
    Lab,
    MAnd,
    MOr,
    Multiformula,
    mand_all,
    meval,
    mor_all,
    scnf_blocks,
    sdnf_blocks,
    simplify,
)
from .sequents import Label


class ModalDepthError(ValueError):
    """S5 interpolation input exceeds modal depth 1."""

    def __init__(self, offending: Formula):
        super().__init__(
            f"S5 interpolation requires modal depth <= 1, but got {print_formula(offending)!r}; "
            "reduce the input first (every S5 formula has a depth-1 equivalent, "
            "see Fitting, Proof Methods for Modal and Intuitionistic Logics, sect. 5.13)"
        )
        self.offending = offending


@dataclass(frozen=True)
class Hypersequent:
    components: tuple[tuple[Formula, ...], ...]

    def __post_init__(self):
        if not self.components:
            raise ValueError("hypersequent needs at least one component")


def hyper_of(f: Formula) -> Hypersequent:
    return Hypersequent(((f,),))


def hyper_labels(h: Hypersequent) -> set[Label]:
    return {(k,) for k in range(1, len(h.components) + 1)}


def hyper_items(h: Hypersequent) -> Iterator[tuple[int, Formula]]:
    for k, comp in enumerate(h.components, start=1):
        for f in comp:
            yield k, f


def interpret_hyper(h: Hypersequent) -> Formula:
    return or_all([Box(or_all(list(comp))) for comp in h.components])


def holds_hyper(m: KripkeModel, interp: Interpretation, h: Hypersequent) -> bool:
    for k, f in hyper_items(h):
        if (k,) not in interp:
            raise ValueError(f"interpretation lacks component {k}")
        if satisfies(m, interp[(k,)], f):
            return True
    return False


def cluster_interpretations(h: Hypersequent, m: KripkeModel) -> Iterator[Interpretation]:
    n = len(h.components)
    for combo in product(sorted(m.worlds), repeat=n):
        yield {(k,): w for k, w in zip(range(1, n + 1), combo)}


def make_cluster(worlds, val=None) -> KripkeModel:
    ws = frozenset(worlds)
    return make_model(ws, product(ws, ws), val or {})


# ---------------------------------------------------------------------------
# Saturation.

_PRIORITY = {"id": 0, "or": 1, "and": 1, "t": 2, "k": 2, "box": 3}


@dataclass(frozen=True)
class HRedex:
    component: int
    formula: Formula
    rule: str
    target: int | None = None  # component the k rule acts toward


@dataclass(frozen=True)
class HSaturationReport:
    saturated: bool
    redexes: tuple[HRedex, ...]


def hyper_redexes(h: Hypersequent) -> tuple[HRedex, ...]:
    found: list[HRedex] = []
    everywhere = [set(comp) for comp in h.components]
    for k, comp in enumerate(h.components, start=1):
        fs = comp
        for f in fs:
            match f:
                case Top():
                    found.append(HRedex(k, f, "id"))
                case Atom(name):
                    if NegAtom(name) in fs:
                        found.append(HRedex(k, f, "id"))
                case Or(l, r):
                    if l not in fs or r not in fs:
                        found.append(HRedex(k, f, "or"))
                case And(l, r):
                    if l not in fs and r not in fs:
                        found.append(HRedex(k, f, "and"))
                case Box(b):
                    if not any(b in comp2 for comp2 in everywhere):
                        found.append(HRedex(k, f, "box"))
                case Dia(b):
                    if b not in fs:
                        found.append(HRedex(k, f, "t"))
                    for j, comp2 in enumerate(h.components, start=1):
                        if j != k and b not in comp2:
                            found.append(HRedex(k, f, "k", j))
    found.sort(key=lambda r: _PRIORITY[r.rule])
    return tuple(found)


def saturated_s5(h: Hypersequent) -> HSaturationReport:
    rs = hyper_redexes(h)
    return HSaturationReport(saturated=not rs, redexes=rs)


def _add(h: Hypersequent, k: int, f: Formula) -> Hypersequent:
    comp = h.components[k - 1]
    if f in comp:
        return h
    comps = list(h.components)
    comps[k - 1] = comp + (f,)
    return Hypersequent(tuple(comps))


def _new_component(h: Hypersequent, fs: tuple[Formula, ...]) -> tuple[Hypersequent, int]:
    return Hypersequent(h.components + (fs,)), len(h.components) + 1


# ---------------------------------------------------------------------------
# Proof search.


@dataclass(frozen=True)
class HProofTree:
    rule: str
    conclusion: Hypersequent
    premises: tuple["HProofTree", ...] = ()

    def to_text(self, indent: int = 0) -> str:
        lines = [f"{'  ' * indent}{self.rule}: {print_hypersequent(self.conclusion)}"]
        for premise in self.premises:
            lines.append(premise.to_text(indent + 1))
        return "\n".join(lines)


@dataclass(frozen=True)
class HDerivable:
    tree: HProofTree


@dataclass(frozen=True)
class HRefutable:
    witness: Hypersequent


HProofOutcome = Union[HDerivable, HRefutable]

_FUEL = 2_000_000


def _search(h: Hypersequent, fuel: list[int]) -> HProofOutcome:
    fuel[0] -= 1
    if fuel[0] <= 0:
        raise RuntimeError("hypersequent proof search fuel exhausted")
    rs = hyper_redexes(h)
    if not rs:
        return HRefutable(h)
    r = rs[0]
    k, f = r.component, r.formula
    if r.rule == "id":
        name = "id_top" if not isinstance(f, Atom) else "id_p"
        return HDerivable(HProofTree(name, h))
    if r.rule == "or":
        assert isinstance(f, Or)
        premise = _add(_add(h, k, f.left), k, f.right)
        out = _search(premise, fuel)
        return out if isinstance(out, HRefutable) else HDerivable(HProofTree("or", h, (out.tree,)))
    if r.rule == "and":
        assert isinstance(f, And)
        left = _search(_add(h, k, f.left), fuel)
        if isinstance(left, HRefutable):
            return left
        right = _search(_add(h, k, f.right), fuel)
        if isinstance(right, HRefutable):
            return right
        return HDerivable(HProofTree("and", h, (left.tree, right.tree)))
    if r.rule == "t":
        assert isinstance(f, Dia)
        out = _search(_add(h, k, f.body), fuel)
        return out if isinstance(out, HRefutable) else HDerivable(HProofTree("t", h, (out.tree,)))
    if r.rule == "k":
        assert isinstance(f, Dia) and r.target is not None
        out = _search(_add(h, r.target, f.body), fuel)
        return out if isinstance(out, HRefutable) else HDerivable(HProofTree("k", h, (out.tree,)))
    if r.rule == "box":
        assert isinstance(f, Box)
        premise, _ = _new_component(h, (f.body,))
        out = _search(premise, fuel)
        return out if isinstance(out, HRefutable) else HDerivable(HProofTree("box", h, (out.tree,)))
    raise AssertionError(f"unhandled redex {r!r}")


def prove_s5(h: Hypersequent) -> HProofOutcome:
    return _search(h, [_FUEL])


def derivable_s5(f: Formula) -> bool:
    return isinstance(prove_s5(hyper_of(f)), HDerivable)


def countermodel_s5(h: Hypersequent) -> tuple[KripkeModel, Interpretation]:
    """Falsifying cluster for a saturated hypersequent, one world per
    component, under the identity interpretation."""
    if hyper_redexes(h):
        raise ValueError("countermodel requires a saturated hypersequent")
    n = len(h.components)
    val: dict[str, set[int]] = {}
    for k, f in hyper_items(h):
        if isinstance(f, NegAtom):
            val.setdefault(f.name, set()).add(k - 1)
        elif isinstance(f, Atom):
            val.setdefault(f.name, set())
    model = make_cluster(range(n), val)
    return model, {(k,): k - 1 for k in range(1, n + 1)}


# ---------------------------------------------------------------------------
# Propositional uniform interpolation (the base of the S5 construction).


def prop_forall_p(f: Formula, p: str) -> Formula:
    """Strongest p-free consequence-wise interpolant of a propositional
    formula: the conjunction of both p-instantiations."""
    if modal_depth(f) != 0:
        raise ModalDepthError(f)
    conj = And(substitute_atom(f, p, True), substitute_atom(f, p, False))
    return simplify_formula(conj)


# ---------------------------------------------------------------------------
# Interpolant construction (depth <= 1 inputs).


def _check_depth(h: Hypersequent) -> None:
    for _, f in hyper_items(h):
        if modal_depth(f) > 1:
            raise ModalDepthError(f)


class _ApS5:
    def __init__(self, p: str):
        self.p = p
        self.memo: dict[Hypersequent, Multiformula] = {}
        self.fuel = _FUEL

    def run(self, h: Hypersequent) -> Multiformula:
        cached = self.memo.get(h)
        if cached is not None:
            return cached
        self.fuel -= 1
        if self.fuel <= 0:
            raise RuntimeError("interpolant recursion fuel exhausted")
        rs = hyper_redexes(h)
        result = self._saturated(h) if not rs else self._row(h, rs[0])
        self.memo[h] = result
        return result

    def dia_disjunction(self, h: Hypersequent) -> Formula:
        bodies: list[Formula] = []
        for _, f in hyper_items(h):
            if isinstance(f, Dia) and f.body not in bodies:
                bodies.append(f.body)
        return or_all(bodies)

    def _saturated(self, h: Hypersequent) -> Multiformula:
        lits: list[Multiformula] = []
        seen: set[tuple[int, Formula]] = set()
        for k, f in hyper_items(h):
            if is_literal(f) and f.name != self.p and (k, f) not in seen:
                seen.add((k, f))
                lits.append(Lab((k,), f))
        dia = Lab((1,), Dia(prop_forall_p(self.dia_disjunction(h), self.p)))
        return MOr(mor_all(lits), dia)

    def box_parts(
        self, h: Hypersequent, r: HRedex
    ) -> tuple[Hypersequent, int, list[tuple[Formula, dict[Label, Formula]]]]:
        assert isinstance(r.formula, Box)
        premise, new_k = _new_component(h, (r.formula.body,))
        sub = simplify(self.run(premise))
        label_set = frozenset((j,) for j in range(1, new_k + 1))
        parts = []
        for block in scnf_blocks(sub, label_set):
            entries = dict(block)
            delta = entries.pop((new_k,))
            parts.append((delta, entries))
        return premise, new_k, parts

    def _row(self, h: Hypersequent, r: HRedex) -> Multiformula:
        k, f = r.component, r.formula
        if r.rule == "id":
            return Lab((k,), TOP)
        if r.rule == "or":
            assert isinstance(f, Or)
            return self.run(_add(_add(h, k, f.left), k, f.right))
        if r.rule == "and":
            assert isinstance(f, And)
            return MAnd(self.run(_add(h, k, f.left)), self.run(_add(h, k, f.right)))
        if r.rule == "t":
            assert isinstance(f, Dia)
            return self.run(_add(h, k, f.body))
        if r.rule == "k":
            assert isinstance(f, Dia) and r.target is not None
            return self.run(_add(h, r.target, f.body))
        if r.rule == "box":
            _, _, parts = self.box_parts(h, r)
            conjuncts = [
                mor_all(
                    [Lab((k,), Box(delta))]
                    + [Lab(t, gamma) for t, gamma in sorted(entries.items())]
                )
                for delta, entries in parts
            ]
            return mand_all(conjuncts)
        raise AssertionError(f"unhandled redex {r!r}")


def ap_s5(h: Hypersequent, p: str) -> Multiformula:
    """Interpolant multiformula for a depth <= 1 hypersequent."""
    _check_depth(h)
    return _ApS5(p).run(h)


def forall_p_s5(f: Formula, p: str) -> Formula:
    m = simplify(ap_s5(hyper_of(f), p))
    blocks = sdnf_blocks(m, frozenset({(1,)}))
    xi = or_all([block[0][1] for block in blocks])
    return simplify_formula(xi)


def exists_p_s5(f: Formula, p: str) -> Formula:
    return simplify_formula(negate(forall_p_s5(negate(f), p)))


# ---------------------------------------------------------------------------
# Constructive refutation inside a cluster: injectify by duplicating worlds,
# flip p at out-of-range worlds to kill the diamond disjunction, then set p
# at range worlds according to the component literals.

ZPairs = frozenset[tuple[int, int]]


def _dup_world(m: KripkeModel, w: int) -> tuple[KripkeModel, int]:
    new = max(m.worlds) + 1
    worlds = m.worlds | {new}
    val = {a: (vs | {new} if w in vs else vs) for a, vs in m.val.items()}
    return make_model(worlds, product(worlds, worlds), val), new


class _RefuterS5:
    def __init__(self, p: str):
        self.p = p
        self.ap = _ApS5(p)
        self.fuel = _FUEL

    def refute(self, h, model, interp) -> tuple[KripkeModel, Interpretation, ZPairs]:
        self.fuel -= 1
        if self.fuel <= 0:
            raise RuntimeError("refutation recursion fuel exhausted")
        rs = hyper_redexes(h)
        if not rs:
            return self._saturated(h, model, interp)
        return self._row(h, rs[0], model, interp)

    def _row(self, h, r: HRedex, model, interp):
        k, f = r.component, r.formula
        if r.rule == "id":
            raise AssertionError("an axiomatic hypersequent has an irrefutable interpolant")
        if r.rule == "or":
            return self.refute(_add(_add(h, k, f.left), k, f.right), model, interp)
        if r.rule == "and":
            left = _add(h, k, f.left)
            if not meval(model, interp, self.ap.run(left)):
                return self.refute(left, model, interp)
            right = _add(h, k, f.right)
            assert not meval(model, interp, self.ap.run(right))
            return self.refute(right, model, interp)
        if r.rule == "t":
            return self.refute(_add(h, k, f.body), model, interp)
        if r.rule == "k":
            assert r.target is not None
            return self.refute(_add(h, r.target, f.body), model, interp)
        if r.rule == "box":
            premise, new_k, parts = self.ap.box_parts(h, r)
            v = None
            for delta, entries in parts:
                if satisfies(model, interp[(k,)], Box(delta)):
                    continue
                if any(satisfies(model, interp[t], gm) for t, gm in entries.items()):
                    continue
                v = next(u for u in sorted(model.worlds) if not satisfies(model, u, delta))
                break
            assert v is not None, "false interpolant must have a failing conjunct"
            extended = dict(interp)
            extended[(new_k,)] = v
            m2, j2, z = self.refute(premise, model, extended)
            return m2, {t: j2[t] for t in interp}, z
        raise AssertionError(f"unhandled redex {r!r}")

    def _saturated(self, h, model, interp):
        interp = dict(interp)
        z: ZPairs = frozenset((w, w) for w in model.worlds)
        # (1) injectify by duplicating shared worlds inside the cluster
        used: dict[int, int] = {}
        for k in range(1, len(h.components) + 1):
            w = interp[(k,)]
            if w in used:
                model, new = _dup_world(model, w)
                interp[(k,)] = new
                step = {x: [x] for x in model.worlds if x != new}
                step[w] = [w, new]
                z = frozenset((o, n) for o, c in z for n in step.get(c, ()))
            used[interp[(k,)]] = k
        # (2) falsify the diamond disjunction at every out-of-range world by
        # choosing the p-instantiation that fails there
        disj = self.ap.dia_disjunction(h)
        rng = set(interp.values())
        pval = set(model.val.get(self.p, frozenset()))
        for v in sorted(model.worlds - rng):
            for choice in (True, False):
                candidate = (pval | {v}) if choice else (pval - {v})
                if not satisfies(
                    with_valuation(model, self.p, frozenset(candidate)), v, disj
                ):
                    pval = candidate
                    break
            else:
                raise AssertionError(
                    "false propositional interpolant admits a falsifying p-value"
                )
        # (3) set p at range worlds from component literals
        for k, f in hyper_items(h):
            if isinstance(f, NegAtom) and f.name == self.p:
                pval.add(interp[(k,)])
            elif isinstance(f, Atom) and f.name == self.p:
                pval.discard(interp[(k,)])
        model = with_valuation(model, self.p, frozenset(pval))
        return model, interp, z


def refute_s5_with_certificate(
    h: Hypersequent, p: str, model: KripkeModel, interp: Interpretation
) -> tuple[KripkeModel, Interpretation, ZPairs]:
    if hyper_redexes(h):
        raise ValueError("refute requires a saturated hypersequent")
    engine = _RefuterS5(p)
    if meval(model, interp, engine.ap.run(h)):
        raise ValueError("interpolant holds under the interpretation; nothing to refute")
    return engine.refute(h, model, dict(interp))


def refute_s5(
    h: Hypersequent, p: str, model: KripkeModel, interp: Interpretation
) -> tuple[KripkeModel, Interpretation]:
    m2, i2, _ = refute_s5_with_certificate(h, p, model, interp)
    return m2, i2


# ---------------------------------------------------------------------------
# Text syntax: components separated by ';', e.g. "p, <>q ; ~q".


def parse_hypersequent(text: str) -> Hypersequent:
    p = _Parser(text)
    components: list[tuple[Formula, ...]] = []
    current: list[Formula] = []
    while True:
        tok = p.peek()
        if p.at_formula_start():
            current.append(p.formula())
        elif tok.kind in (",", ";", "eof"):
            pass
        else:
            raise ParseError(f"unexpected {tok.text!r} in hypersequent", tok.pos)
        tok = p.peek()
        if tok.kind == ",":
            p.next()
            continue
        if tok.kind == ";":
            p.next()
            components.append(tuple(current))
            current = []
            continue
        if tok.kind == "eof":
            components.append(tuple(current))
            return Hypersequent(tuple(components))
        raise ParseError(f"unexpected {tok.text!r} in hypersequent", tok.pos)


def print_hypersequent(h: Hypersequent) -> str:
    return " ; ".join(", ".join(print_formula(f) for f in comp) for comp in h.components)
