"""Corpus generation and the executable property suites.

The suites tie the whole package together: uniform interpolation end to end
(with the prover as oracle), the interpolant conditions over enumerated
models, the refutation engine's postconditions, and the semantic lemmas
about sequent readings, transformations, and bisimulation invariance.

Everything is deterministic given (seed, bounds).  The pairwise implication
stage factors both corpora into provable-equivalence classes: candidates are
grouped by their truth signature over a model panel and each member is
verified equivalent to its class representative by the prover, so the
factoring is exact rather than heuristic.  Hard semantic rejections (a panel
countermodel) short-circuit provability checks soundly.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field

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
    implies,
    modal_depth,
    negate,
    parse_formula,
    print_formula,
    vars_of,
)
from .interpolation import ap, exists_p, forall_p, refute_with_certificate
from .models import (
    Bisimulation,
    KripkeModel,
    bisimilar_interpretations,
    clone,
    duplicate,
    enumerate_models,
    find_bisim,
    holds_sequent,
    model_from_json,
    model_to_json,
    replace_subtree,
    satisfies,
    subtree,
    treelike_interpretations,
    tree_root,
    validate_class,
    verify_bisimulation,
    with_valuation,
)
from .multiformulas import (
    Multiformula,
    meval,
    mlabels,
    mvars,
    parse_multiformula,
    print_multiformula,
)
from .prover import Derivable, Refutable, countermodel, prove
from .s5 import (
    HRefutable,
    Hypersequent,
    countermodel_s5,
    derivable_s5,
    exists_p_s5,
    forall_p_s5,
    hyper_of,
    prove_s5,
)
from .sequents import (
    NestedSequent,
    interpret,
    is_saturated,
    labels,
    parse_sequent,
    print_sequent,
    sequent_of,
)

SUITES = (
    "uip-K",
    "uip-D",
    "uip-T",
    "uip-S5",
    "nuip",
    "bnuip",
    "lemma7",
    "lemma14",
    "thm3",
    "soundness",
)

ATOM_POOL = ("p", "q", "r", "s")


@dataclass(frozen=True)
class Bounds:
    max_connectives: int = 3
    max_atoms: int = 2
    max_worlds: int = 4


@dataclass
class Corpus:
    formulas: list[Formula]
    sequents: list[NestedSequent]
    hypersequents: list[Hypersequent]
    models: dict[str, list[KripkeModel]]
    seed: int
    bounds: Bounds


def enumerate_formulas(max_connectives: int, atoms: tuple[str, ...]) -> list[Formula]:
    """All NNF formulas with at most the given number of connectives."""
    leaves: list[Formula] = [BOT, TOP]
    for a in atoms:
        leaves.extend((Atom(a), NegAtom(a)))
    by_size: dict[int, list[Formula]] = {0: leaves}
    for n in range(1, max_connectives + 1):
        out: list[Formula] = []
        for sub in by_size[n - 1]:
            out.append(Box(sub))
            out.append(Dia(sub))
        for k in range(n):
            for left in by_size[k]:
                for right in by_size[n - 1 - k]:
                    out.append(And(left, right))
                    out.append(Or(left, right))
        by_size[n] = out
    return [f for n in range(max_connectives + 1) for f in by_size[n]]


def random_formula(rng: random.Random, connectives: int, atoms: tuple[str, ...]) -> Formula:
    if connectives == 0:
        kind = rng.randrange(2 + 2 * len(atoms))
        if kind == 0:
            return BOT
        if kind == 1:
            return TOP
        a = atoms[(kind - 2) // 2]
        return Atom(a) if kind % 2 == 0 else NegAtom(a)
    op = rng.choice("&|[]<>")
    if op in "[]<>":
        body = random_formula(rng, connectives - 1, atoms)
        return Box(body) if op == "[" or op == "]" else Dia(body)
    k = rng.randrange(connectives)
    left = random_formula(rng, k, atoms)
    right = random_formula(rng, connectives - 1 - k, atoms)
    return And(left, right) if op == "&" else Or(left, right)


def gen_corpus(seed: int, bounds: Bounds) -> Corpus:
    """Deterministic corpus: exhaustive formulas up to three connectives,
    seeded random sampling beyond, models by exhaustive enumeration."""
    if bounds.max_connectives < 1 or bounds.max_atoms < 1 or bounds.max_worlds < 1:
        raise ValueError("bounds must be positive")
    atoms = ATOM_POOL[: bounds.max_atoms]
    rng = random.Random(seed)
    formulas = enumerate_formulas(min(bounds.max_connectives, 3), atoms)
    for size in range(4, bounds.max_connectives + 1):
        formulas.extend(random_formula(rng, size, atoms) for _ in range(200))

    pool = enumerate_formulas(1, atoms)
    sequents: list[NestedSequent] = []
    for _ in range(60):
        shape = rng.randrange(4)
        def node() -> tuple[Formula, ...]:
            return tuple(rng.choice(pool) for _ in range(rng.randrange(1, 3)))
        if shape == 0:
            g = NestedSequent(node())
        elif shape == 1:
            g = NestedSequent(node(), (NestedSequent(node()),))
        elif shape == 2:
            g = NestedSequent(node(), (NestedSequent(node()), NestedSequent(node())))
        else:
            g = NestedSequent(node(), (NestedSequent(node(), (NestedSequent(node()),)),))
        sequents.append(g)

    flat_pool = [f for f in pool if modal_depth(f) <= 1]
    hypersequents: list[Hypersequent] = []
    for _ in range(40):
        n = rng.randrange(1, 4)
        comps = tuple(
            tuple(rng.choice(flat_pool) for _ in range(rng.randrange(1, 3)))
            for _ in range(n)
        )
        hypersequents.append(Hypersequent(comps))

    models = {
        klass: list(enumerate_models(klass, bounds.max_worlds, set(atoms)))
        for klass in ("K", "D", "T", "S5")
    }
    return Corpus(formulas, sequents, hypersequents, models, seed, bounds)


# ---------------------------------------------------------------------------
# Truth-signature panel: one bit per (model, world) point, composed bottom-up
# over formula structure.  A zero bit is a concrete countermodel, so panel
# rejections of validity are exact; panel acceptance is confirmed by the
# prover.


class Panel:
    def __init__(self, models: list[KripkeModel]):
        self.models = models
        self.points = [(i, w) for i, m in enumerate(models) for w in sorted(m.worlds)]
        index = {pt: j for j, pt in enumerate(self.points)}
        self.succ = [
            [index[(i, v)] for u, v in models[i].rel if u == w]
            for (i, w) in self.points
        ]
        self.size = len(self.points)
        self.full = (1 << self.size) - 1
        self._sig: dict[Formula, int] = {}
        self._atom: dict[str, int] = {}

    def atom_mask(self, name: str) -> int:
        mask = self._atom.get(name)
        if mask is None:
            mask = 0
            for j, (i, w) in enumerate(self.points):
                if w in self.models[i].val.get(name, frozenset()):
                    mask |= 1 << j
            self._atom[name] = mask
        return mask

    def sig(self, f: Formula) -> int:
        s = self._sig.get(f)
        if s is not None:
            return s
        match f:
            case Top():
                s = self.full
            case Atom(name):
                s = self.atom_mask(name)
            case NegAtom(name):
                s = self.full ^ self.atom_mask(name)
            case And(l, r):
                s = self.sig(l) & self.sig(r)
            case Or(l, r):
                s = self.sig(l) | self.sig(r)
            case Box(b):
                sb = self.sig(b)
                s = 0
                for j, js in enumerate(self.succ):
                    if all(sb >> t & 1 for t in js):
                        s |= 1 << j
            case Dia(b):
                sb = self.sig(b)
                s = 0
                for j, js in enumerate(self.succ):
                    if any(sb >> t & 1 for t in js):
                        s |= 1 << j
            case _:
                s = 0  # Bot
        self._sig[f] = s
        return s

    def counterexample(self, f: Formula) -> tuple[KripkeModel, int] | None:
        s = self.sig(f)
        if s == self.full:
            return None
        j = next(k for k in range(self.size) if not s >> k & 1)
        i, w = self.points[j]
        return self.models[i], w


@dataclass
class EquivClass:
    rep: Formula
    members: list[Formula] = field(default_factory=list)


def build_classes(
    formulas: list[Formula], panel: Panel, prove_valid
) -> list[EquivClass]:
    """Partition into provable-equivalence classes.  Panel signatures group
    candidates; the prover verifies each member against its representative,
    splitting classes the panel is too coarse to distinguish."""
    by_sig: dict[int, list[EquivClass]] = {}
    out: list[EquivClass] = []
    for f in formulas:
        bucket = by_sig.setdefault(panel.sig(f), [])
        for cls in bucket:
            if f == cls.rep or (
                prove_valid(implies(f, cls.rep)) and prove_valid(implies(cls.rep, f))
            ):
                cls.members.append(f)
                break
        else:
            cls = EquivClass(f, [f])
            bucket.append(cls)
            out.append(cls)
    return out


# ---------------------------------------------------------------------------
# Reports.


@dataclass
class SuiteReport:
    suite: str
    total: int
    failures: list[dict]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> str:
        return json.dumps(
            {
                "suite": self.suite,
                "total": self.total,
                "failures": len(self.failures),
                "first_counterexample": self.failures[0] if self.failures else None,
            }
        )

    def to_text(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lines = [f"{self.suite}: {status} ({self.total} checks, {len(self.failures)} failures)"]
        if self.failures:
            lines.append(f"first counterexample: {json.dumps(self.failures[0])}")
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Uniform interpolation end to end (Def.-15 conditions with the prover as
# the provability oracle).


class _UipEngine:
    """Per-logic provability, interpolation, and memoization."""

    def __init__(self, logic: str):
        self.logic = logic
        self._derivable: dict[Formula, bool] = {}

    def valid(self, f: Formula) -> bool:
        r = self._derivable.get(f)
        if r is None:
            if self.logic == "S5":
                r = derivable_s5(f)
            else:
                r = isinstance(prove(sequent_of(f), self.logic), Derivable)
            self._derivable[f] = r
        return r

    def forall(self, f: Formula, p: str) -> Formula:
        if self.logic == "S5":
            return forall_p_s5(f, p)
        return forall_p(f, p, self.logic)

    def exists(self, f: Formula, p: str) -> Formula:
        if self.logic == "S5":
            return exists_p_s5(f, p)
        return exists_p(f, p, self.logic)


def run_uip(logic: str, corpus: Corpus, p: str = "p") -> SuiteReport:
    engine = _UipEngine(logic)
    if logic == "S5":
        formulas = [f for f in corpus.formulas if modal_depth(f) <= 1]
        panel_models = [m for m in corpus.models["S5"] if len(m.worlds) <= 3]
    else:
        formulas = list(corpus.formulas)
        panel_models = [m for m in corpus.models[logic] if len(m.worlds) <= 3]
    panel = Panel(panel_models)
    failures: list[dict] = []
    total = 0

    def fail(check: str, **info) -> None:
        failures.append({"suite": f"uip-{logic}", "check": check, "logic": logic, **info})

    if logic == "S5":
        # the modal axioms characteristic of the cluster semantics, plus a
        # refutation with a verified countermodel
        axioms = [
            parse_formula("[](p -> q) -> ([]p -> []q)"),
            parse_formula("[]p -> p"),
            parse_formula("<>p -> []<>p"),
        ]
        for axiom in axioms:
            total += 1
            if not engine.valid(axiom):
                fail("s5-axiom", phi=print_formula(axiom))
        total += 1
        outcome = prove_s5(hyper_of(parse_formula("p -> []p")))
        if not isinstance(outcome, HRefutable):
            fail("s5-refutable", phi="p -> []p")
        else:
            cm, ci = countermodel_s5(outcome.witness)
            if satisfies(cm, ci[(1,)], parse_formula("p -> []p")):
                fail("s5-countermodel", phi="p -> []p", model=model_to_json(cm))

    # Equivalence classes for the pairwise stage.
    phi_classes = build_classes(formulas, panel, engine.valid)
    psis = [f for f in formulas if p not in vars_of(f)]
    psi_classes = build_classes(psis, panel, engine.valid)

    # Interpolants per representative, then per member with transfer checks.
    xi_of: dict[Formula, Formula] = {}
    eta_of: dict[Formula, Formula] = {}
    odd_members: list[Formula] = []  # members needing direct pair checks
    for cls in phi_classes:
        xi_of[cls.rep] = engine.forall(cls.rep, p)
        eta_of[cls.rep] = engine.exists(cls.rep, p)

    for cls in phi_classes:
        for f in cls.members:
            xi = engine.forall(f, p) if f != cls.rep else xi_of[cls.rep]
            eta = engine.exists(f, p) if f != cls.rep else eta_of[cls.rep]
            total += 4
            if vars_of(xi) - (vars_of(f) - {p}) or vars_of(eta) - (vars_of(f) - {p}):
                fail("uip-i", phi=print_formula(f), xi=print_formula(xi), eta=print_formula(eta))
            if not engine.valid(implies(xi, f)):
                fail("uip-ii-forall", phi=print_formula(f), xi=print_formula(xi))
            if not engine.valid(implies(f, eta)):
                fail("uip-ii-exists", phi=print_formula(f), eta=print_formula(eta))
            if f != cls.rep:
                same_xi = engine.valid(implies(xi, xi_of[cls.rep])) and engine.valid(
                    implies(xi_of[cls.rep], xi)
                )
                same_eta = engine.valid(implies(eta, eta_of[cls.rep])) and engine.valid(
                    implies(eta_of[cls.rep], eta)
                )
                if not (same_xi and same_eta):
                    # interpolants of provably equal inputs diverged; check
                    # this member against every psi directly
                    odd_members.append(f)
                    xi_of[f] = xi
                    eta_of[f] = eta

    # Pairwise Def.-15 condition (iii), falsifiable directions, on class
    # representatives (results transfer along verified equivalences).
    def check_pair(phi: Formula, psi: Formula) -> None:
        nonlocal total
        xi, eta = xi_of[phi], eta_of[phi]
        total += 2
        if engine.valid(implies(psi, phi)):
            conclusion = implies(psi, xi)
            if panel.sig(conclusion) != panel.full or not engine.valid(conclusion):
                fail(
                    "uip-iii-forall",
                    phi=print_formula(phi),
                    psi=print_formula(psi),
                    xi=print_formula(xi),
                )
        if engine.valid(implies(phi, psi)):
            conclusion = implies(eta, psi)
            if panel.sig(conclusion) != panel.full or not engine.valid(conclusion):
                fail(
                    "uip-iii-exists",
                    phi=print_formula(phi),
                    psi=print_formula(psi),
                    eta=print_formula(eta),
                )

    psi_reps = [cls.rep for cls in psi_classes]
    for cls in phi_classes:
        sig_phi = panel.sig(cls.rep)
        for psi in psi_reps:
            sig_psi = panel.sig(psi)
            if sig_psi & ~sig_phi and sig_phi & ~sig_psi:
                total += 2  # both premises refuted by panel countermodels
                continue
            check_pair(cls.rep, psi)
    for f in odd_members:
        for psi in psi_reps:
            check_pair(f, psi)

    return SuiteReport(f"uip-{logic}", total, failures)


# ---------------------------------------------------------------------------
# Prover/semantics cross-validation ("soundness").


def run_soundness(corpus: Corpus) -> SuiteReport:
    failures: list[dict] = []
    total = 0
    for logic in ("K", "D", "T"):
        models = corpus.models[logic]
        panel = Panel(models)
        for f in corpus.formulas:
            total += 1
            outcome = prove(sequent_of(f), logic)
            if isinstance(outcome, Derivable):
                if panel.sig(f) != panel.full:
                    cm = panel.counterexample(f)
                    failures.append(
                        {
                            "suite": "soundness",
                            "check": "derivable-but-falsifiable",
                            "logic": logic,
                            "phi": print_formula(f),
                            "model": model_to_json(cm[0]),
                            "world": cm[1],
                        }
                    )
            else:
                model, interp = countermodel(outcome.witness, logic)
                ok = validate_class(model, logic) and not satisfies(
                    model, interp[(1,)], f
                )
                if not ok:
                    failures.append(
                        {
                            "suite": "soundness",
                            "check": "countermodel-invalid",
                            "logic": logic,
                            "phi": print_formula(f),
                            "model": model_to_json(model),
                        }
                    )
    return SuiteReport("soundness", total, failures)


# ---------------------------------------------------------------------------
# NUIP conditions (i) and (ii) over enumerated models.


def nuip_check_interpolant(
    g: NestedSequent,
    p: str,
    logic: str,
    interpolant: Multiformula,
    models: list[KripkeModel],
) -> dict | None:
    """First counterexample to conditions (i)/(ii) for a given interpolant,
    or None.  Exposed separately so corrupted interpolants can be probed."""
    if p in mvars(interpolant) or not mlabels(interpolant) <= frozenset(labels(g)):
        return {
            "check": "nuip-i",
            "logic": logic,
            "sequent": print_sequent(g),
            "interpolant": print_multiformula(interpolant),
        }
    label_set = labels(g)
    for idx, model in enumerate(models):
        for interp in treelike_interpretations(label_set, model):
            if meval(model, interp, interpolant) and not holds_sequent(model, interp, g):
                return {
                    "check": "nuip-ii",
                    "logic": logic,
                    "sequent": print_sequent(g),
                    "interpolant": print_multiformula(interpolant),
                    "model": model_to_json(model),
                    "interp": {str(list(k)): w for k, w in interp.items()},
                }
    return None


def run_nuip(corpus: Corpus, p: str = "p", max_worlds: int = 3) -> SuiteReport:
    failures: list[dict] = []
    total = 0
    for logic in ("K", "D", "T"):
        models = [m for m in corpus.models[logic] if len(m.worlds) <= max_worlds]
        for g in corpus.sequents:
            total += 1
            failure = nuip_check_interpolant(g, p, logic, ap(g, p, logic), models)
            if failure is not None:
                failures.append({"suite": "nuip", **failure})
    return SuiteReport("nuip", total, failures)


# ---------------------------------------------------------------------------
# BNUIP condition (iii)': the refutation engine's three postconditions.


def saturated_corpus(corpus: Corpus, logic: str) -> list[NestedSequent]:
    """Saturated sequents reached by proof search over the corpus."""
    out: list[NestedSequent] = []
    seen: set[NestedSequent] = set()
    for g in corpus.sequents:
        outcome = prove(g, logic)
        if isinstance(outcome, Refutable) and outcome.witness not in seen:
            seen.add(outcome.witness)
            out.append(outcome.witness)
    return out


def run_bnuip(
    corpus: Corpus, p: str = "p", max_worlds: int = 3, max_sequents: int = 40
) -> SuiteReport:
    failures: list[dict] = []
    total = 0

    def fail(check: str, **info) -> None:
        failures.append({"suite": "bnuip", "check": check, **info})

    for logic in ("K", "D", "T"):
        sequents = saturated_corpus(corpus, logic)[:max_sequents]
        models = [m for m in corpus.models[logic] if len(m.worlds) <= max_worlds]
        for g in sequents:
            interpolant = ap(g, p, logic)
            label_set = labels(g)
            for model in models:
                for interp in treelike_interpretations(label_set, model):
                    if meval(model, interp, interpolant):
                        continue
                    total += 1
                    info = {
                        "logic": logic,
                        "sequent": print_sequent(g),
                        "model": model_to_json(model),
                        "interp": {str(list(k)): w for k, w in interp.items()},
                    }
                    try:
                        m2, i2, zpairs = refute_with_certificate(g, p, model, interp, logic)
                    except Exception as exc:  # noqa: BLE001 - report, don't crash the suite
                        fail("refute-raised", error=repr(exc), **info)
                        continue
                    if not validate_class(m2, logic):
                        fail("class-broken", **info)
                        continue
                    if holds_sequent(m2, i2, g):
                        fail("sequent-not-falsified", **info)
                        continue
                    cert_ok = verify_bisimulation(model, m2, Bisimulation(zpairs, p)) and all(
                        (interp[s], i2[s]) in zpairs for s in interp
                    )
                    if not cert_ok or bisimilar_interpretations(model, interp, m2, i2, p) is None:
                        fail("not-bisimilar", **info)
    return SuiteReport("bnuip", total, failures)


# ---------------------------------------------------------------------------
# Semantic lemmas.


def run_lemma7(corpus: Corpus, max_worlds: int = 3) -> SuiteReport:
    failures: list[dict] = []
    total = 0
    sequents = [g for g in corpus.sequents if len(labels(g)) <= 3]
    models = [m for m in corpus.models["K"] if len(m.worlds) <= max_worlds]
    for g in sequents:
        iota = interpret(g)
        label_set = labels(g)
        for model in models:
            total += 1
            for w in sorted(model.worlds):
                lhs = satisfies(model, w, iota)
                rhs = all(
                    holds_sequent(model, interp, g)
                    for interp in treelike_interpretations(label_set, model)
                    if interp[(1,)] == w
                )
                if lhs != rhs:
                    failures.append(
                        {
                            "suite": "lemma7",
                            "sequent": print_sequent(g),
                            "model": model_to_json(model),
                            "world": w,
                            "iota": print_formula(iota),
                        }
                    )
                    break
    return SuiteReport("lemma7", total, failures)


def _check_pairs_bisimilar(m1, m2, pairs, p) -> bool:
    from .models import _bisim_blocks

    blocks = _bisim_blocks(m1, m2, p)
    return all(blocks[(0, a)] == blocks[(1, b)] for a, b in pairs)


def run_lemma14(corpus: Corpus, cases: int = 200, p: str = "p") -> SuiteReport:
    rng = random.Random(corpus.seed + 14)
    failures: list[dict] = []
    total = 0

    def fail(op: str, klass: str, model: KripkeModel, detail: str) -> None:
        failures.append(
            {
                "suite": "lemma14",
                "op": op,
                "class": klass,
                "model": model_to_json(model),
                "detail": detail,
            }
        )

    pool = {
        klass: [m for m in corpus.models[klass] if len(m.worlds) >= 2]
        for klass in ("K", "D", "T")
    }
    ops = ("duplicate", "clone", "replace")
    for _ in range(cases):
        klass = rng.choice(("K", "D", "T"))
        model = rng.choice(pool[klass])
        op = rng.choice(ops)
        total += 1
        root = tree_root(model)
        if op == "duplicate":
            w = rng.choice(sorted(model.worlds - {root}))
            surgery = duplicate(model, w)
            expect_class = True
        elif op == "clone":
            reflexive = sorted(u for u, v in model.rel if u == v)
            if not reflexive:
                # K-models are irreflexive; the precondition must fail
                try:
                    clone(model, rng.choice(sorted(model.worlds)))
                    fail("clone", klass, model, "clone accepted an irreflexive world")
                except ValueError:
                    pass
                continue
            w = rng.choice(reflexive)
            surgery = clone(model, w)
            was_leaf = not any(u == w and v != w for u, v in model.rel)
            # cloning preserves K/T-models; it breaks D-models at leaves
            expect_class = not (klass == "D" and was_leaf)
        else:
            # replace a subtree with a copy whose p valuation is scrambled;
            # that copy is p-bisimilar to the original at every world
            w = rng.choice(sorted(model.worlds))
            sub = subtree(model, w)
            flipped = with_valuation(
                sub, p, frozenset(x for x in sub.worlds if rng.random() < 0.5)
            )
            surgery = replace_subtree(model, w, flipped)
            expect_class = True

        got_class = validate_class(surgery.model, klass)
        if got_class != expect_class:
            fail(op, klass, model, f"class validity {got_class}, expected {expect_class}")
            continue
        pairs = [(u, nu) for u, nu in surgery.kept.items()]
        pairs += [(u, nu) for u, nu in surgery.copies.items()]
        if not _check_pairs_bisimilar(model, surgery.model, pairs, p):
            fail(op, klass, model, "stated bisimilarity pairs not confirmed")
    return SuiteReport("lemma14", total, failures)


def run_thm3(corpus: Corpus, p: str = "p", samples: int = 400) -> SuiteReport:
    rng = random.Random(corpus.seed + 3)
    failures: list[dict] = []
    total = 0
    formulas = [
        f for f in corpus.formulas if modal_depth(f) <= 2 and p not in vars_of(f)
    ]
    if len(formulas) > 400:
        formulas = rng.sample(formulas, 400)
    models = [m for m in corpus.models["K"] if len(m.worlds) <= 3]
    for _ in range(samples):
        m1 = rng.choice(models)
        m2 = rng.choice(models)
        w1 = rng.choice(sorted(m1.worlds))
        w2 = rng.choice(sorted(m2.worlds))
        z = find_bisim(m1, w1, m2, w2, p)
        if z is None:
            continue
        total += 1
        if not verify_bisimulation(m1, m2, z):
            failures.append(
                {
                    "suite": "thm3",
                    "check": "clauses",
                    "m1": model_to_json(m1),
                    "m2": model_to_json(m2),
                }
            )
            continue
        for f in formulas:
            if satisfies(m1, w1, f) != satisfies(m2, w2, f):
                failures.append(
                    {
                        "suite": "thm3",
                        "check": "truth-transfer",
                        "m1": model_to_json(m1),
                        "m2": model_to_json(m2),
                        "w1": w1,
                        "w2": w2,
                        "phi": print_formula(f),
                    }
                )
                break
    return SuiteReport("thm3", total, failures)


# ---------------------------------------------------------------------------
# Dispatcher and replay.


def run_suite(name: str, corpus: Corpus) -> SuiteReport:
    if name in ("uip-K", "uip-D", "uip-T", "uip-S5"):
        return run_uip(name.split("-", 1)[1], corpus)
    if name == "nuip":
        return run_nuip(corpus)
    if name == "bnuip":
        return run_bnuip(corpus)
    if name == "lemma7":
        return run_lemma7(corpus)
    if name == "lemma14":
        return run_lemma14(corpus)
    if name == "thm3":
        return run_thm3(corpus)
    if name == "soundness":
        return run_soundness(corpus)
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")


def recheck_failure(failure: dict) -> bool:
    """Re-run a serialized counterexample in isolation; True iff it fails
    again (reports are replayable)."""
    check = failure.get("check", "")
    logic = failure.get("logic", "K")
    if check.startswith("uip-ii-forall"):
        engine = _UipEngine(logic)
        return not engine.valid(
            implies(parse_formula(failure["xi"]), parse_formula(failure["phi"]))
        )
    if check.startswith("uip-ii-exists"):
        engine = _UipEngine(logic)
        return not engine.valid(
            implies(parse_formula(failure["phi"]), parse_formula(failure["eta"]))
        )
    if check == "uip-iii-forall":
        engine = _UipEngine(logic)
        return engine.valid(
            implies(parse_formula(failure["psi"]), parse_formula(failure["phi"]))
        ) and not engine.valid(
            implies(parse_formula(failure["psi"]), parse_formula(failure["xi"]))
        )
    if check == "uip-iii-exists":
        engine = _UipEngine(logic)
        return engine.valid(
            implies(parse_formula(failure["phi"]), parse_formula(failure["psi"]))
        ) and not engine.valid(
            implies(parse_formula(failure["eta"]), parse_formula(failure["psi"]))
        )
    if check in ("nuip-i", "nuip-ii"):
        g = parse_sequent(failure["sequent"])
        interpolant = parse_multiformula(failure["interpolant"])
        if check == "nuip-i":
            return failure.get("p", "p") in mvars(interpolant) or not (
                mlabels(interpolant) <= frozenset(labels(g))
            )
        model = model_from_json(failure["model"])
        interp = {tuple(json.loads(k)): w for k, w in failure["interp"].items()}
        return meval(model, interp, interpolant) and not holds_sequent(model, interp, g)
    raise ValueError(f"cannot replay failure of kind {check!r}")
