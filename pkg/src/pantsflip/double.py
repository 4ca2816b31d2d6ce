"""Double pants decompositions: two marked decompositions sharing double curves.

Double curves are the edges of side A and side B carrying equal curve tokens.  A handle is a loop
on each side whose boundary is a shared curve; its slopes are coordinates in a frozen local basis
``(u_i, v_i)`` (the loop classes at construction time).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from itertools import permutations
from typing import Sequence

from . import lattice as L
from .canon import canonical_labeling
from .lattice import ClassVector, SurfaceSig
from .marking import (
    MarkedPants, _set_loop_class, check_marking, digest, flip_marked, inverse_choice, marked_structure,
    s_move_marked, standard_marked,
)
from .pantsgraph import Choice, FlipError, Report, detect_handles, flip_partition, is_standard_graph

Slope = tuple[int, int]


@dataclass(frozen=True)
class HandleState:
    """A handle seen from both sides.  ``index`` and slopes are None when its classes leave every
    frozen basis summand (possible after single-side flips); ``pairing`` is always defined."""

    index: int | None
    loop_a: int
    loop_b: int
    boundary_a: int | None
    boundary_b: int | None
    slope_a: Slope | None
    slope_b: Slope | None
    pairing: int

    @property
    def det(self) -> int:
        if self.slope_a is None or self.slope_b is None:
            return self.pairing
        (p, q), (r, s) = self.slope_a, self.slope_b
        return p * s - q * r


@dataclass(frozen=True)
class DoublePants:
    side_a: MarkedPants
    side_b: MarkedPants
    bases: tuple[tuple[ClassVector, ClassVector], ...]
    order: tuple[int, ...]

    @property
    def sig(self) -> SurfaceSig:
        return self.side_a.sig

    def side(self, name: str) -> MarkedPants:
        return {"A": self.side_a, "B": self.side_b}[name.upper()]

    def with_side(self, name: str, mp: MarkedPants) -> "DoublePants":
        return replace(self, side_a=mp) if name.upper() == "A" else replace(self, side_b=mp)

    def matching(self) -> list[tuple[int, int]]:
        by_token = {t: e for e, t in self.side_b.tokens.items()}
        return sorted((e, by_token[t]) for e, t in self.side_a.tokens.items() if t in by_token)

    def matched_a(self) -> dict[int, int]:
        return dict(self.matching())

    def boundary_token(self, side: str, bnd: int | None, loop: int) -> str:
        mp = self.side(side)
        return mp.tokens[bnd] if bnd is not None else digest("leg-boundary", loop)

    def _make_handle(self, la, ba, lb, bb) -> HandleState:
        ca, cb = self.side_a.classes[la], self.side_b.classes[lb]
        pairing = L.symplectic_pairing(ca, cb)
        for i, (u, v) in enumerate(self.bases, start=1):
            if abs(L.symplectic_pairing(u, v)) != 1:
                continue
            sa, sb = L.coordinates_in(ca, u, v), L.coordinates_in(cb, u, v)
            if sa is not None and sb is not None:
                return HandleState(i, la, lb, ba, bb, sa, sb, pairing)
        return HandleState(None, la, lb, ba, bb, None, None, pairing)

    def handles(self) -> list[HandleState]:
        """Handles whose boundary is a double curve on both sides."""
        groups: dict[str, tuple[list, list]] = {}
        for la, ba in detect_handles(self.side_a.graph):
            groups.setdefault(self.boundary_token("A", ba, la), ([], []))[0].append((la, ba))
        for lb, bb in detect_handles(self.side_b.graph):
            groups.setdefault(self.boundary_token("B", bb, lb), ([], []))[1].append((lb, bb))
        out = []
        for side_a, side_b in groups.values():
            if not side_a or len(side_a) != len(side_b):
                continue
            # two handles share a boundary only in genus 2; split them by homology
            best = None
            for perm in permutations(side_b):
                hs = [self._make_handle(la, ba, lb, bb) for (la, ba), (lb, bb) in zip(side_a, perm)]
                cross = sum(
                    L.symplectic_pairing(self.side_a.classes[x.loop_a], self.side_b.classes[y.loop_b]) == 0
                    for x in hs for y in hs if x is not y
                )
                score = (sum(h.index is not None for h in hs), sum(abs(h.pairing) == 1 for h in hs), cross)
                if best is None or score > best[0]:
                    best = (score, hs)
            out.extend(best[1])
        return sorted(out, key=lambda h: (h.index is None, h.index or 0, h.loop_a))

    def handle(self, index: int) -> HandleState:
        for h in self.handles():
            if h.index == index and index is not None:
                return h
        raise FlipError(f"handle {index} does not have a double-curve boundary")


def standard_double(sig: SurfaceSig) -> DoublePants:
    a, b = standard_marked(sig, "A"), standard_marked(sig, "B")
    g = sig.genus
    bases = tuple((L.basis_a(g, i), L.basis_b(g, i)) for i in range(1, g + 1))
    return DoublePants(a, b, bases, tuple(range(1, g + 1)))


@dataclass
class DoubleReport(Report):
    general_position: bool = False
    standard: bool = False
    strictly_standard: bool = False
    curves: int = 0
    intersections: int = 0

    def summary(self) -> str:
        flag = lambda x: "true" if x else "false"  # noqa: E731
        return (f"curves={self.curves} intersections={self.intersections} "
                f"general_position={flag(self.general_position)} standard={flag(self.standard)} "
                f"strictly_standard={flag(self.strictly_standard)}")


def check_double(dp: DoublePants) -> DoubleReport:
    rep = DoubleReport()
    g = dp.sig.genus
    for name, mp in (("A", dp.side_a), ("B", dp.side_b)):
        sub = check_marking(mp)
        for key, ok in sub.checks.items():
            rep.add(f"{name}.{key}", ok)
        rep.messages.extend(f"{name}.{m}" for m in sub.messages)
    rep.add("same_surface", dp.side_a.sig == dp.side_b.sig, "sides live on different surfaces")
    if not rep.ok:
        return rep
    pairs = dp.matching()
    for ea, eb in pairs:
        rep.add("matched_classes", dp.side_a.unoriented(ea) == dp.side_b.unoriented(eb),
                f"double curve A{ea}/B{eb} carries different classes")
    rep.add("bases", len(dp.bases) == g and all(abs(L.symplectic_pairing(u, v)) == 1 for u, v in dp.bases),
            "handle bases must be g hyperbolic pairs")
    rep.add("order", sorted(dp.order) == list(range(1, g + 1)), f"handle order {dp.order} is not a permutation")
    classes = list(dp.side_a.classes.values()) + list(dp.side_b.classes.values())
    rep.general_position = L.spans_full(classes, 2 * g) if g else True
    rep.add("general_position", rep.general_position, "the two Lagrangian planes do not span H_1")
    hs = dp.handles()
    for h in hs:
        rep.add("handle_det", abs(h.det) == 1, f"handle at A{h.loop_a} has slopes {h.slope_a},{h.slope_b}"
                f" meeting {abs(h.det)} times")
    disjoint = all(
        L.symplectic_pairing(dp.side_a.classes[x.loop_a], dp.side_b.classes[y.loop_b]) == 0
        for x in hs for y in hs if x is not y
    )
    rep.add("handles_disjoint", disjoint, "curves of different handles have nonzero pairing")
    rep.curves = len(dp.side_a.classes) + len(dp.side_b.classes) - len(pairs)
    rep.intersections = sum(abs(h.pairing) for h in hs)
    rep.standard = (
        is_standard_graph(dp.side_a.graph) and is_standard_graph(dp.side_b.graph)
        and len(hs) == g and all(abs(h.pairing) == 1 for h in hs) and disjoint
    )
    matched_a = {a for a, _ in pairs}
    matched_b = {b for _, b in pairs}
    rep.strictly_standard = rep.standard and all(
        e in matched_a or dp.side_a.graph.is_loop(e) for e in dp.side_a.graph.edges
    ) and all(e in matched_b or dp.side_b.graph.is_loop(e) for e in dp.side_b.graph.edges)
    return rep


def _slope_class(dp: DoublePants, index: int, slope: Slope) -> ClassVector:
    u, v = dp.bases[index - 1]
    return L.combine([(slope[0], u), (slope[1], v)], len(u))


def handle_twist(dp: DoublePants, index: int, along: str, direction: int) -> DoublePants:
    if direction not in (1, -1):
        raise ValueError(f"twist direction must be +1 or -1, got {direction}")
    h = dp.handle(index)
    (p, q), (r, s) = h.slope_a, h.slope_b
    along = along.lower()
    if along == "a":
        new_b = (r + direction * p, s + direction * q)
        return dp.with_side("B", _set_loop_class(dp.side_b, h.loop_b, _slope_class(dp, index, new_b)))
    if along == "b":
        new_a = (p + direction * r, q + direction * s)
        return dp.with_side("A", _set_loop_class(dp.side_a, h.loop_a, _slope_class(dp, index, new_a)))
    raise ValueError(f"twist must be along 'a' or 'b', got {along!r}")


# The swap of the two interior curves, found by enumerating all 64 three-letter twist words.
DOUBLE_S_WORD: tuple[tuple[str, int], ...] = (("a", 1), ("b", -1), ("a", 1))


def double_s_move(dp: DoublePants, index: int) -> tuple[DoublePants, list[dict]]:
    word = [{"op": "handle_twist", "handle": index, "along": al, "dir": d} for al, d in DOUBLE_S_WORD]
    for al, d in DOUBLE_S_WORD:
        dp = handle_twist(dp, index, al, d)
    return dp, word


def flip_side(dp: DoublePants, side: str, e: int, choice: Choice | str) -> DoublePants:
    return dp.with_side(side, flip_marked(dp.side(side), e, choice))


def s_move_side(dp: DoublePants, side: str, loop: int, new_class: Sequence[int]) -> DoublePants:
    return dp.with_side(side, s_move_marked(dp.side(side), loop, new_class))


def partner_choice(dp: DoublePants, ea: int, choice: Choice | str) -> tuple[int, Choice]:
    """The side-B edge and choice that reproduce side A's flip of the double curve ``ea``."""
    partner = dp.matched_a().get(ea)
    if partner is None:
        raise FlipError(f"edge {ea} is not a double curve")
    a, b = dp.side_a, dp.side_b
    if a.graph.is_loop(ea) or b.graph.is_loop(partner):
        raise FlipError(f"double curve {ea} is a non-regular curve")
    want = a.token_partition(flip_partition(a.graph, ea, choice))
    for c in Choice:
        if b.token_partition(flip_partition(b.graph, partner, c)) == want:
            return partner, c
    raise FlipError(f"double curve {ea}: the curves around it differ between the sides")


def double_flip(dp: DoublePants, ea: int, choice: Choice | str) -> DoublePants:
    eb, cb = partner_choice(dp, ea, choice)
    return DoublePants(flip_marked(dp.side_a, ea, choice), flip_marked(dp.side_b, eb, cb), dp.bases, dp.order)


def match_curves(dp: DoublePants, ea: int, eb: int) -> DoublePants:
    """Declare side-B edge ``eb`` to be the same curve as side-A edge ``ea`` (classes must agree)."""
    if dp.side_a.unoriented(ea) != dp.side_b.unoriented(eb):
        raise FlipError(f"A{ea} and B{eb} carry different classes; they cannot be one curve")
    tokens = dict(dp.side_b.tokens)
    tokens[eb] = dp.side_a.tokens[ea]
    history = dict(dp.side_b.history)
    history[eb] = ()
    return dp.with_side("B", MarkedPants(dp.side_b.graph, dp.side_b.classes, tokens, history))


def set_token(dp: DoublePants, side: str, e: int, token: str) -> DoublePants:
    mp = dp.side(side)
    tokens = dict(mp.tokens)
    tokens[e] = token
    history = dict(mp.history)
    history[e] = ()
    return dp.with_side(side, MarkedPants(mp.graph, mp.classes, tokens, history))


def _euclid(x: int, y: int) -> list[tuple[str, int]]:
    """Twists, in application order, whose frame matrix maps (1, 0) to (x, y) up to sign."""
    steps: list[tuple[str, int]] = []
    while True:
        if (x, y) in ((1, 0), (-1, 0)):
            return steps
        if x == 0:
            steps.append(("S", 0))
            x, y = -y, x
            continue
        if abs(y) >= abs(x):
            d = 1 if x * y > 0 else -1
            steps.append(("b", d))
            y -= d * x
        else:
            d = 1 if x * y > 0 else -1
            steps.append(("a", d))
            x -= d * y


def realize_slope(h: HandleState, target: Slope) -> list[dict]:
    """Handle twists (at most one double S-move) after which slope_a equals ``target`` up to sign."""
    tx, ty = target
    if L.content(target) != 1:
        raise ValueError(f"target slope {target} is not primitive")
    d = h.det
    # coordinates of the target in the current frame (slope_a, slope_b)
    x = (tx * h.slope_b[1] - ty * h.slope_b[0]) * d
    y = (h.slope_a[0] * ty - h.slope_a[1] * tx) * d
    word: list[dict] = []
    for kind, direction in _euclid(x, y):
        if kind == "S":
            word.extend({"op": "handle_twist", "handle": h.index, "along": al, "dir": dd}
                        for al, dd in DOUBLE_S_WORD)
        else:
            word.append({"op": "handle_twist", "handle": h.index, "along": kind, "dir": direction})
    return word


def set_slope_b_word(h: HandleState, target: Slope) -> list[dict]:
    """Twists along a fixing slope_a and bringing slope_b to ``target`` up to sign."""
    d = h.det
    x = (target[0] * h.slope_b[1] - target[1] * h.slope_b[0]) * d
    y = (h.slope_a[0] * target[1] - h.slope_a[1] * target[0]) * d
    if abs(y) != 1:
        raise ValueError(f"slope_b target {target} does not meet slope_a {h.slope_a} once")
    l = x * y
    step = {"op": "handle_twist", "handle": h.index, "along": "a", "dir": 1 if l > 0 else -1}
    return [dict(step) for _ in range(abs(l))]


def double_structure(dp: DoublePants):
    ca, adj_a, _ = marked_structure(dp.side_a, "A")
    cb, adj_b, idx_b = marked_structure(dp.side_b, "B")
    off = len(ca)
    colors = list(ca) + list(cb)
    adj = [list(x) for x in adj_a] + [[w + off for w in x] for x in adj_b]
    _, _, idx_a = marked_structure(dp.side_a, "A")
    for ea, eb in dp.matching():
        i, j = idx_a[("e", ea)], idx_b[("e", eb)] + off
        adj[i].append(j)
        adj[j].append(i)
    index = {("A",) + k: v for k, v in idx_a.items()}
    index.update({("B",) + k: v + off for k, v in idx_b.items()})
    return colors, adj, index


def canonical_key(dp: DoublePants) -> str:
    colors, adj, _ = double_structure(dp)
    key, _ = canonical_labeling(colors, adj)
    bases = tuple((tuple(u), tuple(v)) for u, v in dp.bases)
    return repr((dp.sig.genus, dp.sig.punctures, bases, dp.order, key))


def with_slopes(dp: DoublePants, index: int, slope_a: Slope, slope_b: Slope) -> DoublePants:
    """Directly set a handle's slopes (a constructor for tests and file loading)."""
    h = dp.handle(index)
    dp = dp.with_side("A", _set_loop_class(dp.side_a, h.loop_a, _slope_class(dp, index, slope_a)))
    return dp.with_side("B", _set_loop_class(dp.side_b, h.loop_b, _slope_class(dp, index, slope_b)))


def swap_order(dp: DoublePants, position: int) -> DoublePants:
    if not 1 <= position < len(dp.order):
        raise FlipError(f"no adjacent pair at position {position} in order {dp.order}")
    order = list(dp.order)
    order[position - 1], order[position] = order[position], order[position - 1]
    return replace(dp, order=tuple(order))


def transpose_word(dp: DoublePants, position: int) -> list[dict]:
    """Steps exchanging the handles at ``position`` and ``position + 1`` of the stored order.

    Twist both handles, flip the first handle's boundary on each side, flip it back on side B and
    then on side A, untwist, and finally record the new order.  Every step is checked on replay.
    """
    if not check_double(dp).strictly_standard:
        raise FlipError("transposition needs a strictly standard state")
    if not 1 <= position < len(dp.order):
        raise FlipError(f"no adjacent pair at position {position} in order {dp.order}")
    h1, h2 = dp.order[position - 1], dp.order[position]
    word: list[dict] = [
        {"op": "handle_twist", "handle": h1, "along": "a", "dir": 1},
        {"op": "handle_twist", "handle": h2, "along": "a", "dir": 1},
    ]
    state = handle_twist(handle_twist(dp, h1, "a", 1), h2, "a", 1)
    hs = state.handle(h1)
    ca, cb = hs.boundary_a, hs.boundary_b
    if ca is None or cb is None:
        raise FlipError(f"handle {h1} is bounded by a leg; nothing to flip")
    after_a = flip_side(state, "A", ca, Choice.CROSS)
    after_b = flip_side(after_a, "B", cb, Choice.CROSS)
    back_b = inverse_choice(after_a.side_b, after_b.side_b, cb)
    back_a = inverse_choice(state.side_a, after_a.side_a, ca)
    word += [
        {"op": "flip", "side": "A", "edge": ca, "choice": Choice.CROSS.value},
        {"op": "flip", "side": "B", "edge": cb, "choice": Choice.CROSS.value},
        {"op": "flip", "side": "B", "edge": cb, "choice": back_b.value},
        {"op": "flip", "side": "A", "edge": ca, "choice": back_a.value},
        {"op": "handle_twist", "handle": h1, "along": "a", "dir": -1},
        {"op": "handle_twist", "handle": h2, "along": "a", "dir": -1},
        {"op": "swap_order", "position": position},
    ]
    return word


def transpose_adjacent(dp: DoublePants, position: int) -> tuple[DoublePants, list[dict]]:
    from .engine import replay

    word = transpose_word(dp, position)
    out = replay(dp, word)
    if not check_double(out).strictly_standard:
        raise AssertionError("transposition left the strictly standard class")
    return out, word
