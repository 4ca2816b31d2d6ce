"""Dual trivalent graphs of pants decompositions and the Whitehead flip.

A vertex is a pair of pants with three ordered slots.  Each slot holds an occupant:
``("e", edge_id, end)`` for one end of an internal edge (a curve) or ``("leg", label, 0)`` for a
boundary component / marked point.  Edge ids survive flips: the flipped curve keeps its id.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence

from .canon import canonical_labeling
from .lattice import SurfaceSig

Occupant = tuple[str, int, int]


class FlipError(ValueError):
    """A generator was applied outside its domain."""


class Choice(str, enum.Enum):
    CROSS = "Cross"
    BAR = "Bar"


class EdgeClass(str, enum.Enum):
    REGULAR = "Regular"
    NON_REGULAR = "NonRegularHandleInterior"
    HANDLE_BOUNDARY = "HandleBoundary"


def edge_occ(eid: int, end: int) -> Occupant:
    return ("e", eid, end)


def leg_occ(label: int) -> Occupant:
    return ("leg", label, 0)


@dataclass
class Report:
    checks: dict[str, bool] = field(default_factory=dict)
    messages: list[str] = field(default_factory=list)

    def add(self, name: str, ok: bool, message: str = "") -> None:
        self.checks[name] = self.checks.get(name, True) and bool(ok)
        if not ok and message:
            self.messages.append(f"{name}: {message}")

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def first_failure(self) -> str | None:
        if self.messages:
            return self.messages[0]
        for k, v in self.checks.items():
            if not v:
                return k
        return None


@dataclass(frozen=True)
class PantsGraph:
    sig: SurfaceSig
    slots: tuple[tuple[Occupant, Occupant, Occupant], ...]

    @cached_property
    def ends(self) -> dict[int, tuple[tuple[int, int], tuple[int, int]]]:
        found: dict[int, list] = {}
        for v, trip in enumerate(self.slots):
            for i, occ in enumerate(trip):
                if occ[0] == "e":
                    found.setdefault(occ[1], [None, None])[occ[2]] = (v, i)
        return {e: (p[0], p[1]) for e, p in found.items()}

    @property
    def edges(self) -> list[int]:
        return sorted(self.ends)

    @property
    def legs(self) -> dict[int, tuple[int, int]]:
        return {occ[1]: (v, i) for v, trip in enumerate(self.slots) for i, occ in enumerate(trip) if occ[0] == "leg"}

    @property
    def num_vertices(self) -> int:
        return len(self.slots)

    def endpoints(self, e: int) -> tuple[int, int]:
        (u, _), (w, _) = self.ends[e]
        return u, w

    def is_loop(self, e: int) -> bool:
        u, w = self.endpoints(e)
        return u == w

    def occupant_edge(self, occ: Occupant) -> int | None:
        return occ[1] if occ[0] == "e" else None

    def neighbors(self, v: int) -> list[int]:
        out = []
        for occ in self.slots[v]:
            if occ[0] == "e":
                (a, _), (b, _) = self.ends[occ[1]]
                out.append(b if (a == v and occ[2] == 0) else a)
        return out

    def stubs(self, e: int) -> tuple[tuple[Occupant, Occupant], tuple[Occupant, Occupant]]:
        """The two occupant pairs flanking ``e``: (at its end-0 vertex, at its end-1 vertex), slot order."""
        (u, i), (w, j) = self.ends[e]
        if u == w:
            raise FlipError(f"edge {e} is a loop (non-regular curve)")
        su = tuple(o for k, o in enumerate(self.slots[u]) if k != i)
        sw = tuple(o for k, o in enumerate(self.slots[w]) if k != j)
        return su, sw  # type: ignore[return-value]

    def cycle_rank(self) -> int:
        return len(self.ends) - self.num_vertices + 1

    def is_connected(self) -> bool:
        if not self.slots:
            return False
        seen = {0}
        todo = [0]
        while todo:
            v = todo.pop()
            for w in self.neighbors(v):
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return len(seen) == self.num_vertices

    def relabel_edges(self, mapping: dict[int, int]) -> "PantsGraph":
        slots = tuple(
            tuple((o[0], mapping[o[1]], o[2]) if o[0] == "e" else o for o in trip) for trip in self.slots
        )
        return PantsGraph(self.sig, slots)  # type: ignore[arg-type]


def validate(gr: PantsGraph) -> Report:
    rep = Report()
    sig = gr.sig
    ok_slots = all(len(t) == 3 for t in gr.slots)
    rep.add("trivalent", ok_slots, "every pants has exactly 3 slots")
    counts: dict[Occupant, int] = {}
    for trip in gr.slots:
        for occ in trip:
            counts[occ] = counts.get(occ, 0) + 1
    rep.add("slots_unique", all(k == 1 for k in counts.values()), "an occupant fills two slots")
    ends_ok = all(
        counts.get(edge_occ(e, 0)) == 1 and counts.get(edge_occ(e, 1)) == 1
        for e in {o[1] for o in counts if o[0] == "e"}
    )
    rep.add("edges_two_ended", ends_ok, "an edge does not have exactly two ends")
    legs = sorted(o[1] for o in counts if o[0] == "leg")
    rep.add("legs", legs == list(range(1, sig.punctures + 1)), f"legs {legs} != 1..{sig.punctures}")
    n_edges = len({o[1] for o in counts if o[0] == "e"})
    rep.add("edge_count", n_edges == sig.num_edges, f"{n_edges} edges, expected 3g-3+n={sig.num_edges}")
    rep.add("vertex_count", gr.num_vertices == sig.num_vertices,
            f"{gr.num_vertices} pants, expected 2g-2+n={sig.num_vertices}")
    if ends_ok and ok_slots:
        rep.add("connected", gr.is_connected(), "graph is disconnected")
        rank = gr.cycle_rank()
        rep.add("cycle_rank", rank == sig.genus, f"cycle rank {rank} != genus {sig.genus}")
    return rep


def classify_edge(gr: PantsGraph, e: int) -> EdgeClass:
    if e not in gr.ends:
        raise FlipError(f"{e} is not an internal edge")
    u, w = gr.endpoints(e)
    if u == w:
        return EdgeClass.NON_REGULAR
    for v in (u, w):
        if any(gr.is_loop(o[1]) for o in gr.slots[v] if o[0] == "e" and o[1] != e):
            return EdgeClass.HANDLE_BOUNDARY
    return EdgeClass.REGULAR


def is_flippable(gr: PantsGraph, e: int) -> bool:
    return e in gr.ends and not gr.is_loop(e)


def regroup(gr: PantsGraph, e: int, at_u: tuple[Occupant, Occupant], at_w: tuple[Occupant, Occupant]) -> PantsGraph:
    """Re-expand the 4-valent vertex obtained by contracting ``e`` with the given stub pairs."""
    (u, i), (w, j) = gr.ends[e]
    slots = list(gr.slots)
    for v, k, new in ((u, i, at_u), (w, j, at_w)):
        filled = iter(new)
        slots[v] = tuple(gr.slots[v][p] if p == k else next(filled) for p in range(3))  # type: ignore[assignment]
    return PantsGraph(gr.sig, tuple(slots))  # type: ignore[arg-type]


def flip_graph(gr: PantsGraph, e: int, choice: Choice | str) -> PantsGraph:
    choice = Choice(choice)
    if e not in gr.ends:
        raise FlipError(f"{e} is not an internal edge")
    (s1, s2), (s3, s4) = gr.stubs(e)
    if choice is Choice.CROSS:
        return regroup(gr, e, (s1, s3), (s2, s4))
    return regroup(gr, e, (s1, s4), (s2, s3))


def flip_partition(gr: PantsGraph, e: int, choice: Choice | str) -> frozenset:
    """The stub partition produced by flipping ``e`` with ``choice`` (as a set of two occupant pairs)."""
    (s1, s2), (s3, s4) = gr.stubs(e)
    if Choice(choice) is Choice.CROSS:
        return frozenset({frozenset({s1, s3}), frozenset({s2, s4})})
    return frozenset({frozenset({s1, s4}), frozenset({s2, s3})})


def current_partition(gr: PantsGraph, e: int) -> frozenset:
    su, sw = gr.stubs(e)
    return frozenset({frozenset(su), frozenset(sw)})


def choice_for_group(gr: PantsGraph, e: int, group: Iterable[Occupant]) -> Choice:
    """The choice that puts the two occupants of ``group`` into one new pants."""
    group = frozenset(group)
    for c in Choice:
        if group in flip_partition(gr, e, c):
            return c
    raise FlipError(f"no flip of {e} groups {sorted(group)}")


def detect_handles(gr: PantsGraph) -> list[tuple[int, int | None]]:
    """(loop edge, boundary edge) per loop; the boundary is None when the third slot is a leg."""
    out = []
    for e in gr.edges:
        if gr.is_loop(e):
            u, _ = gr.endpoints(e)
            third = [o for o in gr.slots[u] if not (o[0] == "e" and o[1] == e)][0]
            out.append((e, third[1] if third[0] == "e" else None))
    return out


def is_standard_graph(gr: PantsGraph) -> bool:
    hs = detect_handles(gr)
    return len(hs) == gr.sig.genus and len({gr.endpoints(l)[0] for l, _ in hs}) == len(hs)


def structure(gr: PantsGraph, edge_color: Callable[[int], Hashable] | None = None, tag: Hashable = None):
    """Node colors and adjacency of the incidence multigraph (pants nodes, curve nodes, leg nodes)."""
    colors: list = []
    index: dict = {}
    for v in range(gr.num_vertices):
        index[("v", v)] = len(colors)
        colors.append(("pants", tag))
    for e in gr.edges:
        index[("e", e)] = len(colors)
        colors.append(("curve", tag, edge_color(e) if edge_color else None))
    for label in sorted(gr.legs):
        index[("leg", label)] = len(colors)
        colors.append(("leg", tag, label))
    adj: list[list[int]] = [[] for _ in colors]
    for v, trip in enumerate(gr.slots):
        for occ in trip:
            other = index[("e", occ[1])] if occ[0] == "e" else index[("leg", occ[1])]
            adj[index[("v", v)]].append(other)
            adj[other].append(index[("v", v)])
    return colors, adj, index


def canonical_form(gr: PantsGraph) -> str:
    colors, adj, _ = structure(gr)
    key, _ = canonical_labeling(colors, adj)
    return repr((gr.sig.genus, gr.sig.punctures, key))


def labeled_key(gr: PantsGraph, edge_color: Callable[[int], Hashable] | None = None):
    """Equality with edge ids and legs fixed, ignoring slot order and vertex numbering."""
    verts = sorted(
        tuple(sorted((o[0], o[1]) for o in trip)) for trip in gr.slots
    )
    colors = tuple((e, edge_color(e)) for e in gr.edges) if edge_color else ()
    return tuple(verts), colors


# --- constructors -------------------------------------------------------------------------------

def caterpillar(sig: SurfaceSig, features: Sequence[Hashable] | None = None) -> PantsGraph:
    """Standard caterpillar: handles (loop leaves) 1..g and legs 1..n attached along a spine.

    Loop of handle i has edge id i-1; remaining edges are numbered from g in construction order.
    ``features`` optionally reorders the attachments: items ``("h", i)`` or ``("leg", j)``.
    """
    g, n = sig.genus, sig.punctures
    if features is None:
        features = [("h", i) for i in range(1, g + 1)] + [("leg", j) for j in range(1, n + 1)]
    slots: list[list[Occupant]] = []
    next_edge = [g]

    def new_edge() -> int:
        e = next_edge[0]
        next_edge[0] += 1
        return e

    def attach(feat) -> tuple[Occupant, list]:
        """Stub hanging from the spine for this feature, plus a setter for the far end."""
        if feat[0] == "leg":
            return leg_occ(feat[1]), []
        loop = feat[1] - 1
        slots.append([edge_occ(loop, 0), edge_occ(loop, 1), None])  # type: ignore[list-item]
        return None, [len(slots) - 1]  # type: ignore[return-value]

    feats = list(features)
    k = len(feats) - 2
    if k == 0:
        (o1, far1), (o2, far2) = attach(feats[0]), attach(feats[1])
        if far1 and far2:
            b = new_edge()
            slots[far1[0]][2] = edge_occ(b, 0)
            slots[far2[0]][2] = edge_occ(b, 1)
        elif far1:
            slots[far1[0]][2] = o2
        else:
            slots[far2[0]][2] = o1
        return PantsGraph(sig, tuple(tuple(t) for t in slots))  # type: ignore[arg-type]

    spine = []
    for _ in range(k):
        slots.append([None, None, None])  # type: ignore[list-item]
        spine.append(len(slots) - 1)

    def hang(feat, v, pos):
        occ, far = attach(feat)
        if far:
            b = new_edge()
            slots[far[0]][2] = edge_occ(b, 0)
            slots[v][pos] = edge_occ(b, 1)
        else:
            slots[v][pos] = occ

    hang(feats[0], spine[0], 0)
    hang(feats[1], spine[0], 1)
    for idx in range(1, k):
        s = new_edge()
        slots[spine[idx - 1]][2] = edge_occ(s, 0)
        slots[spine[idx]][0] = edge_occ(s, 1)
        hang(feats[idx + 1], spine[idx], 1)
    hang(feats[-1], spine[-1], 2)
    return PantsGraph(sig, tuple(tuple(t) for t in slots))  # type: ignore[arg-type]


def theta() -> PantsGraph:
    """Two pants glued along three curves (edges 0, 1, 2)."""
    return PantsGraph(SurfaceSig(2, 0), (
        (edge_occ(0, 0), edge_occ(1, 0), edge_occ(2, 0)),
        (edge_occ(0, 1), edge_occ(1, 1), edge_occ(2, 1)),
    ))


def dumbbell() -> PantsGraph:
    """Two handles glued along the bridge (loops 0, 1; bridge 2)."""
    return caterpillar(SurfaceSig(2, 0))
