"""Finite Kripke models, model classes, bisimulation up to an atom, and the
tree surgeries used by the refutation engine.

Model classes: K-models are finite irreflexive intransitive directed trees,
T-models are reflexive trees, D-models are trees whose leaves (exactly) are
reflexive, and S5 models are single clusters with the total relation.
Transformations return fresh copies together with provenance maps so callers
can re-target interpretations after surgery.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Mapping

from .formulas import And, Atom, Bot, Box, Dia, Formula, NegAtom, Or, Top
from .sequents import Label, NestedSequent, labels

MODEL_CLASSES = ("K", "D", "T", "S5")


@dataclass(frozen=True)
class KripkeModel:
    worlds: frozenset[int]
    rel: frozenset[tuple[int, int]]
    val: Mapping[str, frozenset[int]]
    root: int | None = None


def make_model(
    worlds,
    rel,
    val: Mapping[str, set[int] | frozenset[int]] | None = None,
    root: int | None = None,
) -> KripkeModel:
    val = val or {}
    return KripkeModel(
        worlds=frozenset(worlds),
        rel=frozenset((u, v) for u, v in rel),
        val={a: frozenset(ws) for a, ws in val.items()},
        root=root,
    )


def successors(m: KripkeModel, w: int) -> list[int]:
    return sorted(v for u, v in m.rel if u == w)


def satisfies(m: KripkeModel, w: int, f: Formula) -> bool:
    if w not in m.worlds:
        raise ValueError(f"unknown world {w}")
    match f:
        case Top():
            return True
        case Bot():
            return False
        case Atom(name):
            return w in m.val.get(name, frozenset())
        case NegAtom(name):
            return w not in m.val.get(name, frozenset())
        case And(l, r):
            return satisfies(m, w, l) and satisfies(m, w, r)
        case Or(l, r):
            return satisfies(m, w, l) or satisfies(m, w, r)
        case Box(b):
            return all(satisfies(m, v, b) for u, v in m.rel if u == w)
        case Dia(b):
            return any(satisfies(m, v, b) for u, v in m.rel if u == w)
    raise TypeError(f"not a formula: {f!r}")


def valid_in_model(m: KripkeModel, f: Formula) -> bool:
    return all(satisfies(m, w, f) for w in m.worlds)


# ---------------------------------------------------------------------------
# Multiworld interpretations and sequent truth.

Interpretation = dict[Label, int]


def check_treelike(m: KripkeModel, interp: Interpretation, needed: set[Label]) -> None:
    for s in needed:
        if s not in interp:
            raise ValueError(f"interpretation lacks label {s}")
        if interp[s] not in m.worlds:
            raise ValueError(f"interpretation maps {s} outside the model")
        if len(s) > 1:
            parent = s[:-1]
            if parent in interp and (interp[parent], interp[s]) not in m.rel:
                raise ValueError(f"interpretation not treelike at {s}")


def holds_sequent(m: KripkeModel, interp: Interpretation, g: NestedSequent) -> bool:
    """True iff some labeled member of g is satisfied at its world."""
    from .sequents import items

    check_treelike(m, interp, labels(g))
    return any(satisfies(m, interp[s], f) for s, f in items(g))


def treelike_interpretations(
    label_set: set[Label], m: KripkeModel
) -> Iterator[Interpretation]:
    """All treelike maps from a prefix-closed label set into m."""
    ordered = sorted(label_set, key=lambda s: (len(s), s))
    succ = {w: successors(m, w) for w in m.worlds}

    def extend(i: int, interp: Interpretation) -> Iterator[Interpretation]:
        if i == len(ordered):
            yield dict(interp)
            return
        s = ordered[i]
        choices = sorted(m.worlds) if len(s) == 1 else succ[interp[s[:-1]]]
        for w in choices:
            interp[s] = w
            yield from extend(i + 1, interp)
        interp.pop(s, None)

    return extend(0, {})


# ---------------------------------------------------------------------------
# Model classes.


def tree_edges(m: KripkeModel) -> frozenset[tuple[int, int]]:
    return frozenset((u, v) for u, v in m.rel if u != v)


def reflexive_worlds(m: KripkeModel) -> frozenset[int]:
    return frozenset(w for w in m.worlds if (w, w) in m.rel)


def _is_tree(m: KripkeModel) -> tuple[bool, int | None]:
    """Check the irreflexive part of the relation forms a directed tree."""
    edges = tree_edges(m)
    parents: dict[int, int] = {}
    for u, v in edges:
        if v in parents:
            return False, None
        parents[v] = u
    roots = [w for w in sorted(m.worlds) if w not in parents]
    if len(roots) != 1:
        return False, None
    root = roots[0]
    seen = {root}
    frontier = [root]
    while frontier:
        u = frontier.pop()
        for x, v in edges:
            if x == u and v not in seen:
                seen.add(v)
                frontier.append(v)
    if seen != m.worlds:
        return False, None
    return True, root


def tree_root(m: KripkeModel) -> int:
    ok, root = _is_tree(m)
    if not ok:
        raise ValueError("model is not a tree")
    return root


def leaves(m: KripkeModel) -> frozenset[int]:
    edges = tree_edges(m)
    return frozenset(w for w in m.worlds if not any(u == w for u, _ in edges))


def validate_class(m: KripkeModel, klass: str) -> bool:
    if klass == "S5":
        return m.rel == frozenset(product(m.worlds, m.worlds)) and (
            m.root is None or m.root in m.worlds
        )
    if klass not in ("K", "D", "T"):
        raise ValueError(f"unknown model class {klass!r}")
    ok, root = _is_tree(m)
    if not ok:
        return False
    if m.root is not None and m.root != root:
        return False
    refl = reflexive_worlds(m)
    if klass == "K":
        return not refl
    if klass == "T":
        return refl == m.worlds
    return refl == leaves(m)  # D: seriality on a finite tree


# ---------------------------------------------------------------------------
# Bisimulation up to an atomic proposition, by partition refinement on the
# disjoint union of the two models.  The refinement ignores the exempt atom;
# the greatest bisimulation is recovered from the stable partition.


@dataclass(frozen=True)
class Bisimulation:
    pairs: frozenset[tuple[int, int]]  # (world of m1, world of m2)
    atom: str


def _bisim_blocks(m1: KripkeModel, m2: KripkeModel, p: str) -> dict[tuple[int, int], int]:
    states = [(0, w) for w in sorted(m1.worlds)] + [(1, w) for w in sorted(m2.worlds)]
    models = (m1, m2)
    atoms = sorted((set(m1.val) | set(m2.val)) - {p})
    succ = {
        (side, w): [(side, v) for u, v in models[side].rel if u == w]
        for side, w in states
    }

    def atom_key(side: int, w: int) -> tuple[bool, ...]:
        return tuple(w in models[side].val.get(a, frozenset()) for a in atoms)

    block = {s: atom_key(*s) for s in states}
    while True:
        refined = {
            s: (block[s], frozenset(block[t] for t in succ[s])) for s in states
        }
        ids: dict[object, int] = {}
        next_block = {}
        for s in states:
            key = refined[s]
            if key not in ids:
                ids[key] = len(ids)
            next_block[s] = ids[key]
        if len(set(next_block.values())) == len(set(block.values())):
            return next_block
        block = next_block


def find_bisim(
    m1: KripkeModel, w1: int, m2: KripkeModel, w2: int, p: str
) -> Bisimulation | None:
    """Greatest bisimulation up to p relating w1 and w2, if the worlds are
    bisimilar; None otherwise."""
    block = _bisim_blocks(m1, m2, p)
    if block[(0, w1)] != block[(1, w2)]:
        return None
    pairs = frozenset(
        (u, v)
        for u in m1.worlds
        for v in m2.worlds
        if block[(0, u)] == block[(1, v)]
    )
    return Bisimulation(pairs, p)


def bisimilar_interpretations(
    m1: KripkeModel,
    i1: Mapping[Label, int],
    m2: KripkeModel,
    i2: Mapping[Label, int],
    p: str,
) -> Bisimulation | None:
    """A single bisimulation up to p relating i1 and i2 labelwise, or None."""
    if set(i1) != set(i2):
        return None
    block = _bisim_blocks(m1, m2, p)
    if any(block[(0, i1[s])] != block[(1, i2[s])] for s in i1):
        return None
    pairs = frozenset(
        (u, v)
        for u in m1.worlds
        for v in m2.worlds
        if block[(0, u)] == block[(1, v)]
    )
    return Bisimulation(pairs, p)


def verify_bisimulation(
    m1: KripkeModel, m2: KripkeModel, z: Bisimulation
) -> bool:
    """Independent check of the atoms/forth/back clauses; no refinement."""
    if not z.pairs:
        return False
    atoms = (set(m1.val) | set(m2.val)) - {z.atom}
    for w, w2 in z.pairs:
        for q in atoms:
            if (w in m1.val.get(q, frozenset())) != (w2 in m2.val.get(q, frozenset())):
                return False
        for u, v in m1.rel:
            if u == w and not any(
                (v, v2) in z.pairs and (w2, v2) in m2.rel for v2 in m2.worlds
            ):
                return False
        for u2, v2 in m2.rel:
            if u2 == w2 and not any(
                (v, v2) in z.pairs and (w, v) in m1.rel for v in m1.worlds
            ):
                return False
    return True


# ---------------------------------------------------------------------------
# Tree surgeries (with provenance).


@dataclass(frozen=True)
class Surgery:
    model: KripkeModel
    kept: dict[int, int] = field(default_factory=dict)  # surviving id -> new id
    copies: dict[int, int] = field(default_factory=dict)  # copied/grafted id -> new id


def subtree_worlds(m: KripkeModel, w: int) -> frozenset[int]:
    seen = {w}
    frontier = [w]
    while frontier:
        u = frontier.pop()
        for x, v in m.rel:
            if x == u and v != u and v not in seen:
                seen.add(v)
                frontier.append(v)
    return frozenset(seen)


def subtree(m: KripkeModel, w: int) -> KripkeModel:
    """Generated submodel rooted at w (tree models: the subtree)."""
    ws = subtree_worlds(m, w)
    return KripkeModel(
        worlds=ws,
        rel=frozenset((u, v) for u, v in m.rel if u in ws and v in ws),
        val={a: vs & ws for a, vs in m.val.items()},
        root=w,
    )


def _fresh_ids(m: KripkeModel, count: int) -> Iterator[int]:
    start = max(m.worlds, default=-1) + 1
    return iter(range(start, start + count))


def replace_subtree(m: KripkeModel, w: int, n: KripkeModel) -> Surgery:
    """Replace the subtree rooted at w with the tree model n (grafting n's
    root onto w's parents).  n must carry a root."""
    if w not in m.worlds:
        raise ValueError(f"unknown world {w}")
    if n.root is None:
        raise ValueError("replacement model must have a root")
    cut = subtree_worlds(m, w)
    kept_ids = m.worlds - cut
    fresh = _fresh_ids(m, len(n.worlds))
    copies = {u: next(fresh) for u in sorted(n.worlds)}
    kept = {u: u for u in kept_ids}
    rel = {(u, v) for u, v in m.rel if u in kept_ids and v in kept_ids}
    rel |= {(copies[u], copies[v]) for u, v in n.rel}
    rel |= {(u, copies[n.root]) for u, v in m.rel if v == w and u in kept_ids}
    val = {
        a: frozenset(m.val.get(a, frozenset()) & kept_ids)
        | frozenset(copies[u] for u in n.val.get(a, frozenset()))
        for a in set(m.val) | set(n.val)
    }
    root = m.root if m.root in kept_ids else (copies[n.root] if m.root == w else None)
    model = KripkeModel(frozenset(kept_ids | set(copies.values())), frozenset(rel), val, root)
    return Surgery(model, kept, copies)


def _copy_attach(m: KripkeModel, w: int, attach_from: list[int]) -> Surgery:
    sub = subtree_worlds(m, w)
    fresh = _fresh_ids(m, len(sub))
    copies = {u: next(fresh) for u in sorted(sub)}
    rel = set(m.rel)
    rel |= {(copies[u], copies[v]) for u, v in m.rel if u in sub and v in sub}
    rel |= {(u, copies[w]) for u in attach_from}
    val = {
        a: vs | frozenset(copies[u] for u in vs & sub) for a, vs in m.val.items()
    }
    model = KripkeModel(
        m.worlds | frozenset(copies.values()), frozenset(rel), val, m.root
    )
    return Surgery(model, {u: u for u in m.worlds}, copies)


def duplicate(m: KripkeModel, w: int) -> Surgery:
    """Insert a copy of the subtree at w alongside it, as a sibling.

    The copy's root is attached to w's tree parents (self loops do not
    count as parenthood: attaching the copy below w itself would destroy
    the tree shape)."""
    if w not in m.worlds:
        raise ValueError(f"unknown world {w}")
    parents = [u for u, v in m.rel if v == w and u != w]
    if not parents:
        raise ValueError("cannot duplicate the root of a tree model")
    return _copy_attach(m, w, parents)


def clone(m: KripkeModel, w: int) -> Surgery:
    """Insert a copy of the subtree at w as a child of w; requires w R w."""
    if w not in m.worlds:
        raise ValueError(f"unknown world {w}")
    if (w, w) not in m.rel:
        raise ValueError("cloning requires a reflexive world")
    return _copy_attach(m, w, [w])


def split_reflexive_leaf(m: KripkeModel, w: int, count: int) -> tuple[Surgery, list[int]]:
    """Detach a reflexive leaf's self loop into `count` fresh reflexive leaf
    children, each bisimilar to w and carrying w's valuation.  Preserves
    D-models; used to separate a sequent node from its children when a
    serial model interprets them all at one leaf."""
    if (w, w) not in m.rel:
        raise ValueError("split requires a reflexive leaf")
    if any(u == w and v != w for u, v in m.rel):
        raise ValueError("split requires a leaf")
    fresh = list(_fresh_ids(m, count))
    rel = set(m.rel) - {(w, w)}
    for x in fresh:
        rel.add((w, x))
        rel.add((x, x))
    val = {
        a: (vs | frozenset(fresh) if w in vs else vs) for a, vs in m.val.items()
    }
    model = KripkeModel(m.worlds | frozenset(fresh), frozenset(rel), val, m.root)
    return Surgery(model, {u: u for u in m.worlds}, {}), fresh


def with_valuation(m: KripkeModel, atom: str, worlds: frozenset[int]) -> KripkeModel:
    val = dict(m.val)
    val[atom] = worlds
    return KripkeModel(m.worlds, m.rel, val, m.root)


# ---------------------------------------------------------------------------
# Exhaustive model enumeration for the test oracles.  Tree shapes are
# generated canonically (each unlabeled shape once), then decorated with all
# valuations; world ids follow depth-first preorder.

_Shape = tuple  # nested tuple of child shapes


def _shape_size(shape: _Shape) -> int:
    return 1 + sum(_shape_size(c) for c in shape)


def _partitions(total: int, max_part: int) -> Iterator[list[int]]:
    if total == 0:
        yield []
        return
    for part in range(min(total, max_part), 0, -1):
        for rest in _partitions(total - part, part):
            yield [part] + rest


_shape_cache: dict[int, list[_Shape]] = {}


def _shapes(n: int) -> list[_Shape]:
    if n in _shape_cache:
        return _shape_cache[n]
    if n == 1:
        out = [()]
    else:
        found: set[_Shape] = set()
        for sizes in _partitions(n - 1, n - 1):
            for combo in product(*[_shapes(k) for k in sizes]):
                found.add(tuple(sorted(combo, key=lambda c: (-_shape_size(c), c))))
        out = sorted(found)
    _shape_cache[n] = out
    return out


def _shape_edges(shape: _Shape, start: int = 0) -> tuple[int, list[tuple[int, int]]]:
    edges = []
    next_id = start + 1
    for child in shape:
        edges.append((start, next_id))
        next_id, child_edges = _shape_edges(child, next_id)
        edges.extend(child_edges)
    return next_id, edges


def enumerate_models(
    klass: str, max_worlds: int, atoms: frozenset[str] | set[str]
) -> Iterator[KripkeModel]:
    """All class models with up to max_worlds worlds, up to isomorphism of
    the frame; valuations enumerated exhaustively."""
    atom_list = sorted(atoms)
    for n in range(1, max_worlds + 1):
        worlds = frozenset(range(n))
        if klass == "S5":
            frames = [frozenset(product(range(n), range(n)))]
        else:
            frames = []
            for shape in _shapes(n):
                _, edges = _shape_edges(shape)
                rel = set(edges)
                if klass == "T":
                    rel |= {(w, w) for w in range(n)}
                elif klass == "D":
                    non_leaves = {u for u, _ in edges}
                    rel |= {(w, w) for w in range(n) if w not in non_leaves}
                frames.append(frozenset(rel))
        for rel in frames:
            for assignment in product(*[range(2 ** n)] * len(atom_list)):
                val = {
                    a: frozenset(w for w in range(n) if mask >> w & 1)
                    for a, mask in zip(atom_list, assignment)
                }
                yield KripkeModel(worlds, rel, val, root=0 if klass != "S5" else None)


# ---------------------------------------------------------------------------
# Serialization.


def model_to_json(m: KripkeModel) -> str:
    doc = {
        "worlds": sorted(m.worlds),
        "rel": sorted([u, v] for u, v in m.rel),
        "val": {a: sorted(ws) for a, ws in sorted(m.val.items())},
        "root": m.root,
    }
    return json.dumps(doc)


def model_from_json(text: str) -> KripkeModel:
    doc = json.loads(text)
    return make_model(doc["worlds"], doc["rel"], doc.get("val", {}), doc.get("root"))


def model_to_dot(m: KripkeModel, name: str = "model") -> str:
    lines = [f"digraph {name} {{"]
    for w in sorted(m.worlds):
        atoms = sorted(a for a, ws in m.val.items() if w in ws)
        label = f"{w}: {{{', '.join(atoms)}}}" if atoms else str(w)
        shape = ' shape=doublecircle' if w == m.root else ""
        lines.append(f'  w{w} [label="{label}"{shape}];')
    for u, v in sorted(m.rel):
        lines.append(f"  w{u} -> w{v};")
    lines.append("}")
    return "\n".join(lines)
