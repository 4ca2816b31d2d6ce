"""Move words, replay, orbit exploration and the search procedures built on them.

A move word is a list of plain dict steps, for example::

    {"op": "flip", "side": "A", "edge": 2, "choice": "Cross"}
    {"op": "double_flip", "edge": 4, "choice": "Bar"}
    {"op": "handle_twist", "handle": 1, "along": "a", "dir": 1}
    {"op": "s_move", "side": "A", "edge": 0, "class": [0, 1, 0, 0]}
    {"op": "macro", "name": "double_s", "handle": 1}
    {"op": "macro", "name": "transpose", "position": 1}
    {"op": "macro", "name": "dehn_twist", "side": "A", "edge": 2, "choice": "Cross"}
    {"op": "match", "a": 3, "b": 5}
    {"op": "set_token", "side": "B", "edge": 5, "token": "..."}
    {"op": "swap_order", "position": 1}

Steps apply to a :class:`DoublePants`; ``flip``, ``s_move`` and the ``dehn_twist`` macro also apply
to a bare :class:`MarkedPants` (the ``side`` key is then ignored).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Union

from . import double as D
from . import marking as M
from .canon import canonical_labeling
from .double import DoublePants, check_double
from .lattice import combine, symplectic_pairing
from .marking import MarkedPants
from .pantsgraph import (
    Choice, FlipError, PantsGraph, choice_for_group, flip_graph, flip_partition, is_standard_graph, theta,
)

State = Union[MarkedPants, DoublePants]
Step = dict


class ReplayError(Exception):
    def __init__(self, index: int, message: str):
        super().__init__(f"step {index}: {message}")
        self.index = index
        self.message = message


class InvariantError(ValueError):
    """The input state violates an invariant required before any search."""


# --- replay -------------------------------------------------------------------------------------

def expand(state: State, step: Step) -> list[Step]:
    """Primitive steps of a macro (a primitive step expands to itself)."""
    if step.get("op") != "macro":
        return [step]
    name = step.get("name")
    if name == "double_s":
        return [{"op": "handle_twist", "handle": step["handle"], "along": al, "dir": d}
                for al, d in D.DOUBLE_S_WORD]
    if name == "transpose":
        if not isinstance(state, DoublePants):
            raise FlipError("transposition acts on double decompositions")
        return D.transpose_word(state, int(step["position"]))
    if name == "dehn_twist":
        side = step.get("side", "A")
        mp = state.side(side) if isinstance(state, DoublePants) else state
        return [{"op": "flip", "side": side, "edge": e, "choice": c.value}
                for e, c in M.dehn_twist_word(mp, int(step["edge"]), step["choice"])]
    raise FlipError(f"unknown macro {name!r}")


def apply_primitive(state: State, step: Step) -> State:
    op = step.get("op")
    if isinstance(state, MarkedPants):
        if op == "flip":
            return M.flip_marked(state, int(step["edge"]), step["choice"])
        if op == "s_move":
            return M.s_move_marked(state, int(step["edge"]), step["class"])
        raise FlipError(f"operation {op!r} needs a double decomposition")
    if op == "flip":
        return D.flip_side(state, step["side"], int(step["edge"]), step["choice"])
    if op == "double_flip":
        return D.double_flip(state, int(step["edge"]), step["choice"])
    if op == "handle_twist":
        return D.handle_twist(state, int(step["handle"]), step["along"], int(step["dir"]))
    if op == "s_move":
        return D.s_move_side(state, step["side"], int(step["edge"]), step["class"])
    if op == "match":
        return D.match_curves(state, int(step["a"]), int(step["b"]))
    if op == "set_token":
        return D.set_token(state, step["side"], int(step["edge"]), step["token"])
    if op == "swap_order":
        if not check_double(state).strictly_standard:
            raise FlipError("reordering handles needs a strictly standard state")
        return D.swap_order(state, int(step["position"]))
    raise FlipError(f"unknown operation {op!r}")


def apply_step(state: State, step: Step) -> State:
    for prim in expand(state, step):
        state = apply_primitive(state, prim)
    return state


def replay(state: State, word: Iterable[Step]) -> State:
    for i, step in enumerate(word):
        try:
            state = apply_step(state, step)
        except (FlipError, ValueError, KeyError, TypeError) as exc:
            raise ReplayError(i, str(exc)) from exc
    return state


def trace(state: State, word: Iterable[Step]) -> list[State]:
    out = [state]
    for i, step in enumerate(word):
        try:
            out.append(apply_step(out[-1], step))
        except (FlipError, ValueError, KeyError, TypeError) as exc:
            raise ReplayError(i, str(exc)) from exc
    return out


def flatten(state: State, word: Iterable[Step]) -> list[Step]:
    """Expand every macro against the state it is applied to."""
    out: list[Step] = []
    for i, step in enumerate(word):
        try:
            prims = expand(state, step)
            for p in prims:
                state = apply_primitive(state, p)
        except (FlipError, ValueError, KeyError, TypeError) as exc:
            raise ReplayError(i, str(exc)) from exc
        out.extend(prims)
    return out


def _inverse_primitive(before: State, after: State, step: Step) -> Step:
    op = step["op"]
    if op == "flip":
        e = int(step["edge"])
        if isinstance(before, DoublePants):
            side = step["side"]
            c = M.inverse_choice(before.side(side), after.side(side), e)
            return {"op": "flip", "side": side, "edge": e, "choice": c.value}
        return {"op": "flip", "edge": e, "choice": M.inverse_choice(before, after, e).value}
    if op == "double_flip":
        e = int(step["edge"])
        return {"op": "double_flip", "edge": e,
                "choice": M.inverse_choice(before.side_a, after.side_a, e).value}
    if op == "handle_twist":
        return dict(step, dir=-int(step["dir"]))
    if op == "s_move":
        e = int(step["edge"])
        mp = before.side(step["side"]) if isinstance(before, DoublePants) else before
        return dict(step, **{"class": list(mp.classes[e])})
    if op == "match":
        e = int(step["b"])
        return {"op": "set_token", "side": "B", "edge": e, "token": before.side_b.tokens[e]}
    if op == "set_token":
        e = int(step["edge"])
        return dict(step, token=before.side(step["side"]).tokens[e])
    if op == "swap_order":
        return dict(step)
    raise FlipError(f"cannot invert {op!r}")


def inverse(state: State, word: Iterable[Step]) -> list[Step]:
    """A word replaying from the endpoint of ``word`` (started at ``state``) back to ``state``.

    Flip choices are relative to slot order, which a detour need not restore, so each inverse
    choice is solved against the state it will actually be applied to.
    """
    prims = flatten(state, word)
    states = trace(state, prims)
    cur = states[-1]
    inv = []
    for k in range(len(prims) - 1, -1, -1):
        step = _inverse_primitive(states[k], cur, prims[k])
        cur = apply_primitive(cur, step)
        inv.append(step)
    return inv


# --- canonical keys and orbits ------------------------------------------------------------------

def state_key(state: State) -> str:
    if isinstance(state, DoublePants):
        return D.canonical_key(state)
    return M.canonical_key(state)


def state_type(state: State) -> str:
    mp = state.side_a if isinstance(state, DoublePants) else state
    return "self-folded" if M.is_self_folded(mp) else "non-self-folded"


def successors(state: State, sides: str = "AB", twists: bool = True) -> list[tuple[Step, State]]:
    out: list[tuple[Step, State]] = []
    if isinstance(state, MarkedPants):
        for e in state.graph.edges:
            if not state.graph.is_loop(e):
                for c in Choice:
                    step = {"op": "flip", "edge": e, "choice": c.value}
                    out.append((step, M.flip_marked(state, e, c)))
        return out
    for side in sides:
        mp = state.side(side)
        for e in mp.graph.edges:
            if not mp.graph.is_loop(e):
                for c in Choice:
                    step = {"op": "flip", "side": side, "edge": e, "choice": c.value}
                    out.append((step, D.flip_side(state, side, e, c)))
    if twists:
        for h in (h for h in state.handles() if h.index is not None):
            for along in "ab":
                for d in (1, -1):
                    step = {"op": "handle_twist", "handle": h.index, "along": along, "dir": d}
                    out.append((step, D.handle_twist(state, h.index, along, d)))
    return out


@dataclass
class OrbitGraph:
    root: str
    nodes: dict[str, dict] = field(default_factory=dict)
    arcs: list[tuple[str, str, Step]] = field(default_factory=list)
    expanded: set[str] = field(default_factory=set)
    truncated: bool = False

    def neighbors(self, key: str) -> set[str]:
        return {b for a, b, _ in self.arcs if a == key and b != key}

    def degree(self, key: str) -> int:
        return len(self.neighbors(key))


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("PANTS_THREADS", "1")))
    except ValueError:
        return 1


def orbit_graph(start: State, depth: int, max_nodes: int | None = None,
                expand_fn: Callable[[State], list[tuple[Step, State]]] = successors) -> OrbitGraph:
    """Breadth-first orbit to ``depth``; nodes are canonical keys tagged by decomposition type."""
    root = state_key(start)
    og = OrbitGraph(root)
    og.nodes[root] = {"type": state_type(start), "depth": 0}
    frontier = [(root, start)]
    workers = thread_count()

    def grow(item):
        key, st = item
        return key, [(step, state_key(nxt), nxt) for step, nxt in expand_fn(st)]

    pool = ThreadPoolExecutor(workers) if workers > 1 else None
    try:
        for level in range(depth):
            results = list(pool.map(grow, frontier)) if pool else [grow(x) for x in frontier]
            nxt_frontier = []
            for key, succ in results:  # merged in frontier order, so output is deterministic
                og.expanded.add(key)
                for step, k2, st2 in succ:
                    og.arcs.append((key, k2, step))
                    if k2 not in og.nodes:
                        if max_nodes is not None and len(og.nodes) >= max_nodes:
                            og.truncated = True
                            continue
                        og.nodes[k2] = {"type": state_type(st2), "depth": level + 1}
                        nxt_frontier.append((k2, st2))
            frontier = nxt_frontier
    finally:
        if pool:
            pool.shutdown()
    return og


def theta_marked() -> MarkedPants:
    """The theta graph with classes a_1, a_2 and -(a_1 + a_2)."""
    gr = theta()
    classes = {0: (1, 0, 0, 0), 1: (0, 0, 1, 0), 2: (-1, 0, -1, 0)}
    return MarkedPants(gr, classes, {e: M.digest("curve", e) for e in gr.edges}, {})


# --- alternating paths in genus 2 ---------------------------------------------------------------

def alternating_normalize(word: list[Step], start: MarkedPants) -> list[Step]:
    """Replace each type-preserving flip by a two-flip detour through the other type.

    Choices are relative to slot order, which a detour need not reproduce, so every step is
    re-solved against the state actually reached, matching the intended state by labeled key.
    """
    if start.sig.genus != 2 or start.sig.punctures != 0:
        raise ValueError("alternating paths are defined for the closed genus-2 surface")
    out: list[Step] = []
    nominal = actual = start
    for i, step in enumerate(flatten(start, word)):
        try:
            target = apply_primitive(nominal, step)
        except (FlipError, ValueError) as exc:
            raise ReplayError(i, str(exc)) from exc
        if state_type(target) != state_type(nominal):
            path = _direct(actual, target, int(step["edge"]))
        else:
            path = _detour(actual, target)
        for s in path:
            actual = apply_primitive(actual, s)
        out.extend(path)
        nominal = target
    return out


def _direct(src: MarkedPants, dst: MarkedPants, e: int) -> list[Step]:
    want = dst.labeled_key()
    for c in Choice:
        step = {"op": "flip", "edge": e, "choice": c.value}
        if apply_primitive(src, step).labeled_key() == want:
            return [step]
    raise AssertionError(f"no flip of {e} reaches the intended state")


def _detour(src: MarkedPants, dst: MarkedPants) -> list[Step]:
    want = dst.labeled_key()
    for s1, mid in successors(src):
        if state_type(mid) == state_type(src):
            continue
        for s2, end in successors(mid):
            if end.labeled_key() == want:
                return [s1, s2]
    raise AssertionError("no alternating detour found")


# --- standardization by flips -------------------------------------------------------------------

def _side_levels(mp: MarkedPants, side: str):
    """Lazy breadth-first levels of flip words on one side, deduplicated by the set of curves."""
    seen = {frozenset(mp.tokens.values())}
    level = [(mp, [])]
    while level:
        yield level
        nxt = []
        for st, w in level:
            for e in st.graph.edges:
                if st.graph.is_loop(e):
                    continue
                for c in Choice:
                    st2 = M.flip_marked(st, e, c)
                    k = frozenset(st2.tokens.values())
                    if k not in seen:
                        seen.add(k)
                        nxt.append((st2, w + [{"op": "flip", "side": side, "edge": e, "choice": c.value}]))
        level = nxt


def standardize(dp: DoublePants, budget: int) -> list[Step] | None:
    """A flip word making ``dp`` standard, searching words of total length <= budget; else None."""
    rep = check_double(dp)
    if not rep.ok:
        raise InvariantError(f"state rejected before search: {rep.first_failure()}")
    if rep.standard:
        return []
    gens = {"A": _side_levels(dp.side_a, "A"), "B": _side_levels(dp.side_b, "B")}
    levels: dict[str, list] = {"A": [], "B": []}

    def level(side: str, d: int):
        while len(levels[side]) <= d:
            nxt = next(gens[side], None)
            if nxt is None:
                return []
            levels[side].append([(s, w) for s, w in nxt if is_standard_graph(s.graph)])
        return levels[side][d]

    for total in range(1, budget + 1):
        for da in range(total + 1):
            la, lb = level("A", da), level("B", total - da)
            for sa, wa in la:
                for sb, wb in lb:
                    cand = DoublePants(sa, sb, dp.bases, dp.order)
                    if check_double(cand).standard:
                        return wa + wb
    return None


# --- sphere part --------------------------------------------------------------------------------

def _feature_key(gr: PantsGraph, occ, handle_label: dict[int, int]):
    """Sort key of a leaf arm: (0, handle) or (1, leg); None for an arm into the tree."""
    if occ[0] == "leg":
        return (1, occ[1])
    (a, _), (b, _) = gr.ends[occ[1]]
    far = b if gr.slots[a][gr.ends[occ[1]][0][1]] == occ else a
    loop = [o[1] for o in gr.slots[far] if o[0] == "e" and gr.is_loop(o[1])]
    if loop:
        return (0, handle_label.get(loop[0], loop[0] + 1))
    return None


def _far_vertex(gr: PantsGraph, occ) -> int:
    (a, i), (b, j) = gr.ends[occ[1]]
    return b if (gr.slots[a][i] == occ) else a


def _subtree_features(gr: PantsGraph, occ, handle_label):
    key = _feature_key(gr, occ, handle_label)
    if key is not None:
        return {key}
    v = _far_vertex(gr, occ)
    back = ("e", occ[1], 1 - occ[2])
    out = set()
    for o in gr.slots[v]:
        if o != back:
            out |= _subtree_features(gr, o, handle_label)
    return out


def normalize_sphere_part(gr: PantsGraph, handle_label: dict[int, int] | None = None) -> list[tuple[int, Choice]]:
    """Flips (edge, choice) turning the handle-complement tree into the sorted caterpillar.

    Rooted at the smallest feature, the walk descends the spine; whenever the next feature is not
    hanging from the current pants, a rotation lifts its subtree one level.  The depth of the
    next feature strictly decreases, so the procedure terminates.
    """
    handle_label = handle_label or {}
    tree = [v for v in range(gr.num_vertices) if not any(o[0] == "e" and gr.is_loop(o[1]) for o in gr.slots[v])]
    inner = {e for e in gr.edges if not gr.is_loop(e) and all(v in tree for v in gr.endpoints(e))}
    if len(inner) != max(len(tree) - 1, 0):
        raise ValueError("the handle complement is not a tree")
    word: list[tuple[int, Choice]] = []
    if len(tree) <= 1:
        return word
    for _ in range(10 * len(tree) ** 2 + 10):
        step = _next_rotation(gr, tree, handle_label)
        if step is None:
            return word
        e, c = step
        word.append(step)
        gr = flip_graph(gr, e, c)
        tree = [v for v in range(gr.num_vertices) if not any(o[0] == "e" and gr.is_loop(o[1]) for o in gr.slots[v])]
    raise AssertionError("sphere-part normalization did not terminate")


def _next_rotation(gr: PantsGraph, tree: list[int], handle_label):
    arms = {v: list(gr.slots[v]) for v in tree}
    feats = sorted(k for v in tree for o in arms[v] if (k := _feature_key(gr, o, handle_label)) is not None)
    first = feats[0]
    v = next(v for v in tree if any(_feature_key(gr, o, handle_label) == first for o in arms[v]))
    incoming = next(o for o in arms[v] if _feature_key(gr, o, handle_label) == first)
    j = 1
    while True:
        others = [o for o in arms[v] if o != incoming]
        want = feats[j]
        keys = [_feature_key(gr, o, handle_label) for o in others]
        if want in keys:
            rest = others[1 - keys.index(want)]
            if keys[1 - keys.index(want)] is not None:
                return None  # last pants: both remaining arms are leaves
            u = _far_vertex(gr, rest)
            incoming = ("e", rest[1], 1 - rest[2])
            v, j = u, j + 1
            continue
        deep = next(o for o in others if want in _subtree_features(gr, o, handle_label))
        sibling = next(o for o in others if o != deep)
        c = _far_vertex(gr, deep)
        back = ("e", deep[1], 1 - deep[2])
        below = [o for o in gr.slots[c] if o != back]
        away = next(o for o in below if want not in _subtree_features(gr, o, handle_label))
        return deep[1], choice_for_group(gr, deep[1], {sibling, away})


# --- connecting strictly standard states --------------------------------------------------------

def handle_labels(dp: DoublePants) -> dict[int, int]:
    return {h.loop_a: h.index for h in dp.handles() if h.index is not None}


def normalize_double(dp: DoublePants) -> list[Step]:
    """Double flips bringing the shared sphere part to the sorted caterpillar."""
    word: list[Step] = []
    labels = handle_labels(dp)
    for e, c in normalize_sphere_part(dp.side_a.graph, labels):
        step = {"op": "double_flip", "edge": e, "choice": c.value}
        word.append(step)
        dp = apply_primitive(dp, step)
    return word


def _occ_node(gr: PantsGraph, occ, index, side):
    if occ[0] == "leg":
        return index[(side, "leg", occ[1])]
    return index[(side, "e", occ[1])]


def _translate_flip(src: DoublePants, dst: DoublePants, step: Step) -> Step:
    """Carry a double flip of ``src`` over to the isomorphic state ``dst``."""
    cs, adj_s, idx_s = D.double_structure(src)
    cd, adj_d, idx_d = D.double_structure(dst)
    ks, order_s = canonical_labeling(cs, adj_s)
    kd, order_d = canonical_labeling(cd, adj_d)
    if ks != kd:
        raise AssertionError("states are not isomorphic")
    node_map = {order_s[p]: order_d[p] for p in range(len(order_s))}
    rev_d = {v: k for k, v in idx_d.items()}
    gs, gd = src.side_a.graph, dst.side_a.graph
    e = int(step["edge"])
    e_dst = rev_d[node_map[idx_s[("A", "e", e)]]][2]
    # the pants node holding each stub pins down which end of the image edge is meant
    pants_map = {v: rev_d[node_map[idx_s[("A", "v", v)]]][2] for v in range(gs.num_vertices)}
    group = next(iter(flip_partition(gs, e, step["choice"])))
    mapped = set()
    for occ in group:
        v_src = next(v for v, trip in enumerate(gs.slots) if occ in trip)
        v_dst = pants_map[v_src]
        if occ[0] == "leg":
            mapped.add(occ)
            continue
        target = rev_d[node_map[idx_s[("A", "e", occ[1])]]][2]
        mapped.add(next(o for o in gd.slots[v_dst] if o[0] == "e" and o[1] == target))
    return {"op": "double_flip", "edge": e_dst, "choice": choice_for_group(gd, e_dst, mapped).value}


def connect_standard(dp1: DoublePants, dp2: DoublePants) -> list[Step]:
    """A word of double flips, handle twists and transposition macros taking dp1 to dp2."""
    if dp1.sig != dp2.sig:
        raise ValueError(f"signature mismatch: {dp1.sig} vs {dp2.sig}")
    if dp1.bases != dp2.bases:
        raise ValueError("the two states use different handle bases")
    for name, dp in (("first", dp1), ("second", dp2)):
        if not check_double(dp).strictly_standard:
            raise InvariantError(f"{name} state is not strictly standard")
    w1 = normalize_double(dp1)
    w2 = normalize_double(dp2)
    cur = replay(dp1, w1)
    n2 = replay(dp2, w2)
    word = list(w1)
    # bubble sort the stored handle order
    target = list(n2.order)
    order = list(cur.order)
    for i in range(len(order)):
        for j in range(len(order) - 1 - i):
            if target.index(order[j]) > target.index(order[j + 1]):
                step = {"op": "macro", "name": "transpose", "position": j + 1}
                cur = apply_step(cur, step)
                word.append(step)
                order[j], order[j + 1] = order[j + 1], order[j]
    for h2 in n2.handles():
        sub = D.realize_slope(cur.handle(h2.index), h2.slope_a)
        cur = replay(cur, sub)
        sub2 = D.set_slope_b_word(cur.handle(h2.index), h2.slope_b)
        cur = replay(cur, sub2)
        word += sub + sub2
    back = inverse(dp2, w2)
    src = n2
    for step in back:
        moved = _translate_flip(src, cur, step)
        src = apply_primitive(src, step)
        cur = apply_primitive(cur, moved)
        word.append(moved)
    if D.canonical_key(cur) != D.canonical_key(dp2):
        raise AssertionError("connection word does not reach the target state")
    return word


# --- random states ------------------------------------------------------------------------------

def random_marking(sig, rng, flips: int = 10, transvections: int = 6) -> MarkedPants:
    """A valid marking: random flips of the standard caterpillar, then a random symplectic map."""
    mp = M.standard_marked(sig, rng.choice("AB"))
    for _ in range(flips):
        edges = [e for e in mp.graph.edges if not mp.graph.is_loop(e)]
        if not edges:
            break
        mp = M.flip_marked(mp, rng.choice(edges), rng.choice(list(Choice)))
    g = sig.genus
    if g == 0:
        return mp
    for _ in range(transvections):
        # transvection x -> x + k <x, v> v preserves the pairing, so relations and primitivity hold
        v = tuple(rng.randint(-1, 1) for _ in range(2 * g))
        k = rng.choice((1, -1))
        mp = MarkedPants(mp.graph, {e: combine([(1, c), (k * symplectic_pairing(c, v), v)], 2 * g)
                                    for e, c in mp.classes.items()}, mp.tokens, mp.history)
    return mp


def random_strictly_standard(sig, rng, flips: int = 6, twists: int = 6, shuffles: int = 3) -> DoublePants:
    dp = D.standard_double(sig)
    for _ in range(flips):
        opts = []
        for e in dp.side_a.graph.edges:
            for c in Choice:
                try:
                    D.partner_choice(dp, e, c)
                    opts.append((e, c))
                except FlipError:
                    pass
        if not opts:
            break
        e, c = rng.choice(opts)
        dp = D.double_flip(dp, e, c)
    for _ in range(shuffles):
        if len(dp.order) > 1:
            dp = D.swap_order(dp, rng.randint(1, len(dp.order) - 1))
    for _ in range(twists):
        hs = [h for h in dp.handles() if h.index is not None]
        if hs:
            dp = D.handle_twist(dp, rng.choice(hs).index, rng.choice("ab"), rng.choice((1, -1)))
    return dp
