"""Homology-marked pants decompositions.

Every edge carries an oriented class; end 0 of an edge has sign +1 and end 1 has sign -1, so the
relation at a pants reads ``sum(sign * class) == 0`` over its three slots (legs contribute 0).

Each edge also carries a curve token: an opaque digest naming the isotopy class of the curve up to
twists along decomposition curves.  Two decompositions share a curve exactly when they carry the
same token, which is how double curves are matched in :mod:`pantsflip.double`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import Hashable, Sequence

from . import lattice as L
from .canon import canonical_labeling
from .lattice import ClassVector, SpanBasis, SurfaceSig
from .pantsgraph import (
    Choice, FlipError, Occupant, PantsGraph, Report, caterpillar, current_partition,
    detect_handles, flip_graph, flip_partition, labeled_key, structure, validate,
)


def digest(*parts: Hashable) -> str:
    return hashlib.blake2b(repr(parts).encode(), digest_size=8).hexdigest()


def loop_token(boundary_token: str, cls: Sequence[int]) -> str:
    # a curve inside a handle is determined by its homology class
    return digest("loop", boundary_token, L.unoriented(cls))


@dataclass(frozen=True)
class MarkedPants:
    graph: PantsGraph
    classes: dict[int, ClassVector]
    tokens: dict[int, str] = field(default_factory=dict, compare=False)
    # per edge: (previous token, stub partition before the flip, older history) or ()
    history: dict[int, tuple] = field(default_factory=dict, compare=False)

    @property
    def sig(self) -> SurfaceSig:
        return self.graph.sig

    @property
    def g(self) -> int:
        return self.graph.sig.genus

    def sign(self, e: int, end: int) -> int:
        return 1 if end == 0 else -1

    def occ_value(self, occ: Occupant) -> ClassVector:
        if occ[0] == "leg":
            return L.zero(self.g)
        return L.scale(self.sign(occ[1], occ[2]), self.classes[occ[1]])

    def occ_token(self, occ: Occupant) -> str:
        if occ[0] == "leg":
            return digest("leg", occ[1])
        return self.tokens[occ[1]]

    def token_partition(self, partition: frozenset) -> tuple:
        return tuple(sorted(tuple(sorted(self.occ_token(o) for o in pair)) for pair in partition))

    def unoriented(self, e: int) -> ClassVector:
        return L.unoriented(self.classes[e])

    def labeled_key(self):
        return labeled_key(self.graph, self.unoriented)


def standard_marked(sig: SurfaceSig, side: str = "A") -> MarkedPants:
    """Caterpillar with loop i carrying a_i (side A) or b_i (side B); other edges carry 0."""
    gr = caterpillar(sig)
    g = sig.genus
    side = side.upper()
    if side not in ("A", "B"):
        raise ValueError(f"side must be A or B, got {side!r}")
    classes = {e: L.zero(g) for e in gr.edges}
    tokens = {e: digest("curve", e) for e in gr.edges}
    for loop, bnd in detect_handles(gr):
        i = loop + 1
        classes[loop] = L.basis_a(g, i) if side == "A" else L.basis_b(g, i)
        btok = tokens[bnd] if bnd is not None else digest("leg-boundary", loop)
        tokens[loop] = loop_token(btok, classes[loop])
    return MarkedPants(gr, classes, tokens, {})


def check_marking(mp: MarkedPants) -> Report:
    rep = validate(mp.graph)
    g = mp.g
    edges = set(mp.graph.edges)
    rep.add("classes_present", set(mp.classes) == edges, "class map does not cover the edges")
    if set(mp.classes) != edges:
        return rep
    rep.add("class_length", all(len(c) == 2 * g for c in mp.classes.values()), "class of wrong length")
    for v, trip in enumerate(mp.graph.slots):
        total = L.combine([(1, mp.occ_value(o)) for o in trip], 2 * g)
        rep.add("pants_relation", L.is_zero(total), f"pants {v}: signed sum {total} != 0")
    for loop, bnd in detect_handles(mp.graph):
        if bnd is not None:
            rep.add("separating_boundary", L.is_zero(mp.classes[bnd]),
                    f"handle boundary {bnd} has nonzero class {mp.classes[bnd]}")
    for e, c in mp.classes.items():
        rep.add("primitive", L.is_zero(c) or L.is_primitive(c), f"edge {e} class {c} is not primitive")
    if mp.tokens:
        rep.add("tokens", set(mp.tokens) == edges and len(set(mp.tokens.values())) == len(edges),
                "curve tokens missing or repeated")
    return rep


def flip_marked(mp: MarkedPants, e: int, choice: Choice | str) -> MarkedPants:
    gr = mp.graph
    if e not in gr.ends:
        raise FlipError(f"{e} is not an internal edge")
    if gr.is_loop(e):
        raise FlipError(f"edge {e} is a non-regular curve (loop); it cannot be flipped")
    old_part = current_partition(gr, e)
    new_part = flip_partition(gr, e, choice)
    new_gr = flip_graph(gr, e, choice)
    (u, i), (w, j) = new_gr.ends[e]
    g = mp.g
    at_u = [o for k, o in enumerate(new_gr.slots[u]) if k != i]
    at_w = [o for k, o in enumerate(new_gr.slots[w]) if k != j]
    # end 0 of e sits at u with sign +1
    cls = L.neg(L.combine([(1, mp.occ_value(o)) for o in at_u], 2 * g))
    other = L.combine([(1, mp.occ_value(o)) for o in at_w], 2 * g)
    if L.add(L.neg(cls), other) != L.zero(g):
        raise AssertionError(f"flip of {e}: pants relations disagree ({cls} vs {other})")
    classes = dict(mp.classes)
    classes[e] = cls
    tokens = dict(mp.tokens)
    history = dict(mp.history)
    if mp.tokens:
        old_key = mp.token_partition(old_part)
        new_key = mp.token_partition(new_part)
        past = mp.history.get(e, ())
        if past and past[1] == new_key:
            tokens[e], history[e] = past[0], past[2]
        else:
            tokens[e] = digest("flip", mp.tokens[e], new_key)
            history[e] = (mp.tokens[e], old_key, past)
    return MarkedPants(new_gr, classes, tokens, history)


def inverse_choice(before: MarkedPants, after: MarkedPants, e: int) -> Choice:
    """The choice that flips ``e`` in ``after`` back to the stub grouping of ``before``."""
    target = before.labeled_key()
    for c in Choice:
        if flip_marked(after, e, c).labeled_key() == target:
            return c
    raise FlipError(f"no flip of {e} restores the previous state")


def dehn_twist_word(mp: MarkedPants, e: int, choice: Choice | str) -> list[tuple[int, Choice]]:
    """Two flips of the same curve whose composite is the twist along it."""
    first = flip_marked(mp, e, choice)
    return [(e, Choice(choice)), (e, inverse_choice(mp, first, e))]


def s_move_marked(mp: MarkedPants, loop: int, new_class: Sequence[int]) -> MarkedPants:
    """Replace the interior curve of a handle by one meeting it once (algebraic pairing +-1)."""
    if loop not in mp.graph.ends or not mp.graph.is_loop(loop):
        raise FlipError(f"edge {loop} is not a handle interior curve")
    new_class = tuple(new_class)
    if len(new_class) != 2 * mp.g:
        raise L.DimensionError("class of wrong length")
    pairing = L.symplectic_pairing(mp.classes[loop], new_class)
    if abs(pairing) != 1 or not L.is_primitive(new_class):
        raise FlipError(f"S-move needs |<old,new>| = 1, got {pairing}")
    return _set_loop_class(mp, loop, new_class)


def _set_loop_class(mp: MarkedPants, loop: int, new_class: ClassVector) -> MarkedPants:
    classes = dict(mp.classes)
    classes[loop] = new_class
    tokens = dict(mp.tokens)
    history = dict(mp.history)
    if mp.tokens:
        bnd = [b for l, b in detect_handles(mp.graph) if l == loop][0]
        btok = mp.tokens[bnd] if bnd is not None else digest("leg-boundary", loop)
        tokens[loop] = loop_token(btok, new_class)
        history[loop] = ()
    return MarkedPants(mp.graph, classes, tokens, history)


def lagrangian_of(mp: MarkedPants) -> SpanBasis:
    return L.span_basis(list(mp.classes.values()), 2 * mp.g)


def marked_structure(mp: MarkedPants, tag: Hashable = None):
    return structure(mp.graph, mp.unoriented, tag)


def canonical_key(mp: MarkedPants) -> str:
    colors, adj, _ = marked_structure(mp)
    key, _ = canonical_labeling(colors, adj)
    return repr((mp.sig.genus, mp.sig.punctures, key))


def is_self_folded(mp: MarkedPants) -> bool:
    return any(mp.graph.is_loop(e) for e in mp.graph.edges)


def transform_classes(mp: MarkedPants, matrix: Sequence[Sequence[int]]) -> MarkedPants:
    """Apply an integer matrix (acting on column vectors) to every class."""
    def act(v):
        return tuple(sum(row[k] * v[k] for k in range(len(v))) for row in matrix)
    return replace(mp, classes={e: act(c) for e, c in mp.classes.items()})
