"""Uniform interpolation over nested sequents for K, D, and T.

``ap`` builds the interpolant multiformula by recursion on the terminating
proof search: each table row fires on the first unsaturated redex (same
deterministic order as the prover), and saturated sequents produce the
disjunction of their non-p labeled literals plus one diamond disjunct per
diamond-bearing node.  ``refute`` realizes the constructive content of the
correctness proof: given a class model in which the interpolant fails, it
surgically builds a bisimilar (up to p) class model falsifying the sequent.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import (
    BOT,
    TOP,
    And,
    Box,
    Dia,
    Formula,
    NegAtom,
    Or,
    is_literal,
    negate,
    or_all,
    simplify_formula,
    vars_of,
)
from .models import (
    Interpretation,
    KripkeModel,
    check_treelike,
    clone,
    duplicate,
    replace_subtree,
    satisfies,
    split_reflexive_leaf,
    subtree,
    successors,
    validate_class,
    with_valuation,
)
from .multiformulas import (
    Lab,
    MAnd,
    MOr,
    Multiformula,
    form,
    mand_all,
    meval,
    mor_all,
    scnf_blocks,
    sdnf_blocks,
    simplify,
)
from .sequents import (
    Label,
    NestedSequent,
    Redex,
    insert_new,
    is_saturated,
    items,
    labels,
    new_child,
    redexes,
    sequent_of,
)

_FUEL = 2_000_000


@dataclass(frozen=True)
class InterpolationTrace:
    root: Multiformula
    steps: tuple[tuple[str, NestedSequent, tuple[Multiformula, ...]], ...]


class _Ap:
    """Interpolant construction engine for one (atom, logic) pair."""

    def __init__(self, p: str, logic: str, trace: list | None = None):
        self.p = p
        self.logic = logic
        self.memo: dict[NestedSequent, Multiformula] = {}
        self.trace = trace
        self.fuel = _FUEL

    def run(self, g: NestedSequent) -> Multiformula:
        cached = self.memo.get(g)
        if cached is not None:
            return cached
        self.fuel -= 1
        if self.fuel <= 0:
            raise RuntimeError("interpolant recursion fuel exhausted")
        rs = redexes(g, self.logic)
        if not rs:
            result = self._saturated(g)
        else:
            result = self._row(g, rs[0])
        self.memo[g] = result
        return result

    # -- saturated sequents -------------------------------------------------

    def dia_bodies(self, g: NestedSequent) -> dict[Label, list[Formula]]:
        out: dict[Label, list[Formula]] = {}
        for s, f in items(g):
            if isinstance(f, Dia):
                bodies = out.setdefault(s, [])
                if f.body not in bodies:
                    bodies.append(f.body)
        return out

    def dia_form(self, bodies: list[Formula]) -> Formula:
        """p-free formula whose failure at a child refutes every diamond body."""
        sub = self.run(sequent_of(or_all(bodies)))
        return simplify_formula(form(sub))

    def _saturated(self, g: NestedSequent) -> Multiformula:
        lits: list[Multiformula] = []
        seen: set[tuple[Label, Formula]] = set()
        for s, f in items(g):
            if is_literal(f) and f.name != self.p and (s, f) not in seen:
                seen.add((s, f))
                lits.append(Lab(s, f))
        dias = [
            Lab(tau, Dia(self.dia_form(bodies)))
            for tau, bodies in sorted(self.dia_bodies(g).items())
        ]
        result = MOr(mor_all(lits), mor_all(dias))
        self._record("saturated", g, tuple(dias))
        return result

    # -- table rows ----------------------------------------------------------

    def box_parts(
        self, g: NestedSequent, r: Redex
    ) -> tuple[NestedSequent, Label, list[tuple[Formula, dict[Label, Formula]]]]:
        assert isinstance(r.formula, Box)
        premise, child = new_child(g, r.label, (r.formula.body,))
        sub = simplify(self.run(premise))
        parts = []
        for block in scnf_blocks(sub, frozenset(labels(premise))):
            entries = dict(block)
            delta = entries.pop(child)
            parts.append((delta, entries))
        return premise, child, parts

    def d_parts(
        self, g: NestedSequent, r: Redex
    ) -> tuple[NestedSequent, Label, list[tuple[Formula, dict[Label, Formula]]]]:
        assert isinstance(r.formula, Dia)
        premise, child = new_child(g, r.label, (r.formula.body,))
        # the d row fires only on childless nodes, so the new label is s*1
        assert child == r.label + (1,)
        sub = simplify(self.run(premise))
        parts = []
        for block in sdnf_blocks(sub, frozenset(labels(premise))):
            entries = dict(block)
            delta = entries.pop(child)
            parts.append((delta, entries))
        return premise, child, parts

    def _row(self, g: NestedSequent, r: Redex) -> Multiformula:
        s, f = r.label, r.formula
        if r.rule == "id":
            result = Lab(s, TOP)
            self._record("id", g, ())
            return result
        if r.rule == "or":
            assert isinstance(f, Or)
            sub = self.run(insert_new(insert_new(g, s, f.left), s, f.right))
            self._record("or", g, (sub,))
            return sub
        if r.rule == "and":
            assert isinstance(f, And)
            left = self.run(insert_new(g, s, f.left))
            right = self.run(insert_new(g, s, f.right))
            self._record("and", g, (left, right))
            return MAnd(left, right)
        if r.rule == "k":
            assert isinstance(f, Dia) and r.target is not None
            sub = self.run(insert_new(g, r.target, f.body))
            self._record("k", g, (sub,))
            return sub
        if r.rule == "t":
            assert isinstance(f, Dia)
            sub = self.run(insert_new(g, s, f.body))
            self._record("t", g, (sub,))
            return sub
        if r.rule == "d":
            _, _, parts = self.d_parts(g, r)
            disjuncts = [
                mand_all(
                    [Lab(s, Dia(delta))]
                    + [Lab(t, gamma) for t, gamma in sorted(entries.items())]
                )
                for delta, entries in parts
            ]
            result = mor_all(disjuncts)
            self._record("d", g, (result,))
            return result
        if r.rule == "box":
            _, _, parts = self.box_parts(g, r)
            conjuncts = [
                mor_all(
                    [Lab(s, Box(delta))]
                    + [Lab(t, gamma) for t, gamma in sorted(entries.items())]
                )
                for delta, entries in parts
            ]
            result = mand_all(conjuncts)
            self._record("box", g, (result,))
            return result
        raise AssertionError(f"unhandled redex {r!r}")

    def _record(self, rule, g, subs) -> None:
        if self.trace is not None:
            self.trace.append((rule, g, subs))


def ap(g: NestedSequent, p: str, logic: str) -> Multiformula:
    """Interpolant multiformula: p-free, labels within labels(g)."""
    return _Ap(p, logic).run(g)


def ap_traced(g: NestedSequent, p: str, logic: str) -> InterpolationTrace:
    steps: list = []
    root = _Ap(p, logic, trace=steps).run(g)
    return InterpolationTrace(root, tuple(steps))


def format_trace(trace: InterpolationTrace) -> str:
    from .multiformulas import print_multiformula
    from .sequents import print_sequent

    lines = []
    for i, (rule, g, subs) in enumerate(trace.steps, start=1):
        lines.append(f"{i}. {rule}: {print_sequent(g)}")
        for sub in subs:
            lines.append(f"     => {print_multiformula(sub)}")
    lines.append(f"result: {print_multiformula(trace.root)}")
    return "\n".join(lines)


def forall_p(f: Formula, p: str, logic: str) -> Formula:
    """Strongest p-free formula entailing f (the universal interpolant)."""
    m = simplify(ap(sequent_of(f), p, logic))
    blocks = sdnf_blocks(m, frozenset({(1,)}))
    xi = or_all([block[0][1] for block in blocks])
    return simplify_formula(xi)


def exists_p(f: Formula, p: str, logic: str) -> Formula:
    """Weakest p-free consequence of f (the existential interpolant)."""
    return simplify_formula(negate(forall_p(negate(f), p, logic)))


def check_nuip_ii(
    g: NestedSequent, p: str, logic: str, model: KripkeModel, interp: Interpretation
) -> bool:
    """A true interpolant forces the sequent to hold (condition (ii))."""
    from .models import holds_sequent

    if meval(model, interp, ap(g, p, logic)):
        return holds_sequent(model, interp, g)
    return True


# ---------------------------------------------------------------------------
# Constructive refutation (condition (iii)').  The certificate is a
# composition of the single-step bisimulations produced by each surgery, so
# the final pair relation is constructed, never searched.

ZPairs = frozenset[tuple[int, int]]


def _compose(z: ZPairs, step: dict[int, list[int]]) -> ZPairs:
    return frozenset((o, n) for o, c in z for n in step.get(c, ()))


def _surgery_step(surgery) -> dict[int, list[int]]:
    step: dict[int, list[int]] = {w: [w] for w in surgery.kept}
    for old, new in surgery.copies.items():
        step.setdefault(old, []).append(new)
    return step


class _Refuter:
    def __init__(self, p: str, logic: str):
        self.p = p
        self.logic = logic
        self.ap = _Ap(p, logic)
        self.fuel = _FUEL

    def refute(
        self, g: NestedSequent, model: KripkeModel, interp: Interpretation
    ) -> tuple[KripkeModel, Interpretation, ZPairs]:
        self.fuel -= 1
        if self.fuel <= 0:
            raise RuntimeError("refutation recursion fuel exhausted")
        rs = redexes(g, self.logic)
        if not rs:
            return self._saturated(g, model, interp)
        return self._row(g, rs[0], model, interp)

    # -- unsaturated sequents mirror the interpolant rows --------------------

    def _row(self, g, r: Redex, model, interp):
        s, f = r.label, r.formula
        if r.rule == "id":
            raise AssertionError("an axiomatic sequent has an irrefutable interpolant")
        if r.rule == "or":
            assert isinstance(f, Or)
            return self.refute(insert_new(insert_new(g, s, f.left), s, f.right), model, interp)
        if r.rule == "and":
            assert isinstance(f, And)
            left = insert_new(g, s, f.left)
            if not meval(model, interp, self.ap.run(left)):
                return self.refute(left, model, interp)
            right = insert_new(g, s, f.right)
            assert not meval(model, interp, self.ap.run(right))
            return self.refute(right, model, interp)
        if r.rule == "k":
            assert r.target is not None
            return self.refute(insert_new(g, r.target, f.body), model, interp)
        if r.rule == "t":
            return self.refute(insert_new(g, s, f.body), model, interp)
        if r.rule == "box":
            premise, child, parts = self.ap.box_parts(g, r)
            v = None
            for delta, entries in parts:
                if satisfies(model, interp[s], Box(delta)):
                    continue
                if any(satisfies(model, interp[t], gm) for t, gm in entries.items()):
                    continue
                v = next(
                    u
                    for u in successors(model, interp[s])
                    if not satisfies(model, u, delta)
                )
                break
            assert v is not None, "false interpolant must have a failing conjunct"
            extended = dict(interp)
            extended[child] = v
            m2, j2, z = self.refute(premise, model, extended)
            return m2, {t: j2[t] for t in interp}, z
        if r.rule == "d":
            premise, child, _ = self.ap.d_parts(g, r)
            succ = successors(model, interp[s])
            assert succ, "serial model must provide a successor"
            extended = dict(interp)
            extended[child] = succ[0]
            m2, j2, z = self.refute(premise, model, extended)
            return m2, {t: j2[t] for t in interp}, z
        raise AssertionError(f"unhandled redex {r!r}")

    # -- saturated sequents: injectify, replace out-of-range, rewrite p ------

    def _saturated(self, g, model, interp):
        interp = dict(interp)
        z: ZPairs = frozenset((w, w) for w in model.worlds)
        model, z = self._injectify(g, model, interp, z)
        # surgery preserves falsity of the p-free interpolant (bisimilarity)
        assert not meval(model, interp, self.ap.run(g))
        model, z = self._fix_out_of_range(g, model, interp, z)
        rng = set(interp.values())
        keep = model.val.get(self.p, frozenset()) - rng
        forced = {
            interp[s]
            for s, f in items(g)
            if isinstance(f, NegAtom) and f.name == self.p
        }
        model = with_valuation(model, self.p, frozenset(keep | forced))
        return model, interp, z

    def _retarget(self, g, interp, prefix: Label, copies: dict[int, int]) -> None:
        for t in labels(g):
            if t[: len(prefix)] == prefix:
                interp[t] = copies[interp[t]]

    def _injectify(self, g, model, interp, z):
        ordered = sorted(labels(g), key=lambda s: (len(s), s))
        taken: dict[int, Label] = {}
        i = 0
        while i < len(ordered):
            s = ordered[i]
            w = interp[s]
            other = taken.get(w)
            if other is None:
                taken[w] = s
                i += 1
                continue
            parent = s[:-1]
            if other == parent:
                if self.logic == "T":
                    surgery = clone(model, w)
                    model = surgery.model
                    self._retarget(g, interp, s, surgery.copies)
                    z = _compose(z, _surgery_step(surgery))
                elif self.logic == "D":
                    # a serial model maps all of parent's sequent children to
                    # the reflexive leaf w; split the leaf to separate them
                    kids = sorted(
                        t for t in labels(g) if len(t) == len(parent) + 1 and t[:-1] == parent
                    )
                    surgery, fresh = split_reflexive_leaf(model, w, len(kids))
                    model = surgery.model
                    for kid, nw in zip(kids, fresh):
                        for t in labels(g):
                            if t[: len(kid)] == kid:
                                interp[t] = nw
                    step = {x: [x] for x in surgery.kept}
                    step[w] = [w] + list(fresh)
                    z = _compose(z, step)
                else:
                    raise AssertionError("parent conflation cannot happen in K")
            else:
                # the processed-prefix invariant leaves only sibling clashes
                assert other[:-1] == parent, (s, other)
                surgery = duplicate(model, w)
                model = surgery.model
                self._retarget(g, interp, s, surgery.copies)
                z = _compose(z, _surgery_step(surgery))
            # re-examine s against the updated interpretation
        return model, z

    def _fix_out_of_range(self, g, model, interp, z):
        rng = set(interp.values())
        for tau, bodies in sorted(self.ap.dia_bodies(g).items()):
            w = interp[tau]
            disj = or_all(bodies)
            for v in successors(model, w):
                if v in rng:
                    continue
                sub = subtree(model, v)
                assert not meval(sub, {(1,): v}, self.ap.run(sequent_of(disj)))
                sub_m, sub_i, sub_z = self.refute(sequent_of(disj), sub, {(1,): v})
                rooted = KripkeModel(sub_m.worlds, sub_m.rel, sub_m.val, root=sub_i[(1,)])
                surgery = replace_subtree(model, v, rooted)
                model = surgery.model
                step = {x: [x] for x in surgery.kept}
                for u, out_world in sub_z:
                    step.setdefault(u, []).append(surgery.copies[out_world])
                z = _compose(z, step)
        return model, z


def refute_with_certificate(
    g: NestedSequent,
    p: str,
    model: KripkeModel,
    interp: Interpretation,
    logic: str,
) -> tuple[KripkeModel, Interpretation, ZPairs]:
    """Refute a saturated sequent whose interpolant fails under (model,
    interp); returns the falsifying class model, the re-targeted
    interpretation, and the constructed bisimulation pairs."""
    if not is_saturated(g, logic):
        raise ValueError("refute requires a saturated sequent")
    if not validate_class(model, logic):
        raise ValueError(f"model is not a {logic}-model")
    check_treelike(model, interp, labels(g))
    engine = _Refuter(p, logic)
    if meval(model, interp, engine.ap.run(g)):
        raise ValueError("interpolant holds under the interpretation; nothing to refute")
    return engine.refute(g, model, dict(interp))


def refute(
    g: NestedSequent,
    p: str,
    model: KripkeModel,
    interp: Interpretation,
    logic: str,
) -> tuple[KripkeModel, Interpretation]:
    m2, i2, _ = refute_with_certificate(g, p, model, interp, logic)
    return m2, i2


def nuip_vars_ok(g: NestedSequent, p: str, interpolant: Multiformula) -> bool:
    """Condition (i): no p, and labels within the sequent's labels."""
    from .multiformulas import mlabels, mvars

    return p not in mvars(interpolant) and mlabels(interpolant) <= frozenset(labels(g))
