import itertools
import random

import pytest

from pantsflip import double as D
from pantsflip import engine as E
from pantsflip.lattice import SurfaceSig
from pantsflip.marking import canonical_key, standard_marked
from pantsflip.pantsgraph import (
    Choice, PantsGraph, canonical_form, caterpillar, edge_occ, flip_graph, is_flippable, leg_occ,
)

SELF, PLAIN = "self-folded", "non-self-folded"


def test_orbit_examples():
    og = E.orbit_graph(standard_marked(SurfaceSig(2, 0)), 1)
    assert og.nodes[og.root]["type"] == SELF
    assert og.degree(og.root) == 2
    assert all(og.nodes[k]["type"] == PLAIN for k in og.neighbors(og.root))
    og = E.orbit_graph(E.theta_marked(), 1)
    assert og.nodes[og.root]["type"] == PLAIN and og.degree(og.root) == 6


def test_orbit_degrees_by_type():
    og = E.orbit_graph(E.theta_marked(), 4)
    assert not og.truncated
    for k in og.expanded:
        assert og.degree(k) == (6 if og.nodes[k]["type"] == PLAIN else 2)


def test_orbit_budget_truncates():
    og = E.orbit_graph(E.theta_marked(), 6, max_nodes=20)
    assert og.truncated and len(og.nodes) <= 20


def test_orbit_deterministic_across_threads(monkeypatch):
    runs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("PANTS_THREADS", threads)
        og = E.orbit_graph(E.theta_marked(), 3)
        runs.append((list(og.nodes.items()), [(a, b) for a, b, _ in og.arcs]))
    assert runs[0] == runs[1]


def random_word(mp, rng, length):
    word = []
    for _ in range(length):
        edges = [e for e in mp.graph.edges if is_flippable(mp.graph, e)]
        step = {"op": "flip", "side": "A", "edge": rng.choice(edges), "choice": rng.choice(["Cross", "Bar"])}
        mp = E.apply_step(mp, step)
        word.append(step)
    return word


def test_alternating_examples():
    t = E.theta_marked()
    # theta -> theta by a Bar flip keeps the type
    step = {"op": "flip", "edge": 2, "choice": "Bar"}
    out = E.alternating_normalize([step], t)
    assert len(out) == 2
    assert E.replay(t, out).labeled_key() == E.replay(t, [step]).labeled_key()
    already = [{"op": "flip", "edge": 2, "choice": "Cross"}]
    assert E.alternating_normalize(already, t) == already
    with pytest.raises(ValueError):
        E.alternating_normalize([], standard_marked(SurfaceSig(3, 0)))


def test_alternating_random_words():
    rng = random.Random(11)
    for _ in range(100):
        start = E.random_marking(SurfaceSig(2, 0), rng, flips=rng.randint(0, 4))
        word = random_word(start, rng, 6)
        out = E.alternating_normalize(word, start)
        states = E.trace(start, out)
        assert all(E.state_type(a) != E.state_type(b) for a, b in zip(states, states[1:]))
        assert canonical_key(states[-1]) == canonical_key(E.replay(start, word))


def test_standardize_examples():
    dp = D.standard_double(SurfaceSig(2, 0))
    assert E.standardize(dp, 4) == []
    bent = D.flip_side(D.flip_side(dp, "A", 2, Choice.CROSS), "B", 2, Choice.CROSS)
    word = E.standardize(bent, 4)
    assert word is not None and len(word) <= 2
    assert D.check_double(E.replay(bent, word)).standard
    bad = D.with_slopes(dp, 1, (1, 0), (1, 0))
    with pytest.raises(E.InvariantError):
        E.standardize(bad, 4)


def test_standardize_gives_up_within_budget():
    dp = D.standard_double(SurfaceSig(2, 1))
    far = dp
    for e in (2, 3):
        far = D.flip_side(far, "A", e, Choice.CROSS)
    assert E.standardize(far, 1) is None
    assert E.standardize(far, 2) is not None


def balanced_six_leg_tree():
    # a central pants with three arms, each ending in a pants with two legs
    slots = (
        (edge_occ(0, 0), edge_occ(1, 0), edge_occ(2, 0)),
        (edge_occ(0, 1), leg_occ(1), leg_occ(2)),
        (edge_occ(1, 1), leg_occ(3), leg_occ(4)),
        (edge_occ(2, 1), leg_occ(5), leg_occ(6)),
    )
    return PantsGraph(SurfaceSig(0, 6), slots)


def apply_flips(gr, word):
    for e, c in word:
        gr = flip_graph(gr, e, c)
    return gr


def test_normalize_sphere_examples():
    cat = caterpillar(SurfaceSig(0, 6))
    assert E.normalize_sphere_part(cat) == []
    tree = balanced_six_leg_tree()
    word = E.normalize_sphere_part(tree)
    assert word
    assert canonical_form(apply_flips(tree, word)) == canonical_form(cat)


def all_trees(n):
    """Every leg-labeled trivalent tree with n legs, reached by flips from the caterpillar."""
    start = caterpillar(SurfaceSig(0, n))
    seen = {canonical_form(start): start}
    todo = [start]
    while todo:
        gr = todo.pop()
        for e in gr.edges:
            for c in Choice:
                nxt = flip_graph(gr, e, c)
                k = canonical_form(nxt)
                if k not in seen:
                    seen[k] = nxt
                    todo.append(nxt)
    return list(seen.values())


@pytest.mark.parametrize("n,count", [(5, 15), (6, 105), (7, 945)])
def test_normalize_sphere_exhaustive(n, count):
    # (2n-5)!! leg-labeled trees
    trees = all_trees(n)
    assert len(trees) == count
    target = canonical_form(caterpillar(SurfaceSig(0, n)))
    for tree in trees:
        assert canonical_form(apply_flips(tree, E.normalize_sphere_part(tree))) == target


def test_connect_examples():
    d3 = D.standard_double(SurfaceSig(3, 0))
    assert E.connect_standard(d3, d3) == []
    target = D.with_slopes(d3, 1, (2, 3), (1, 2))
    word = E.connect_standard(d3, target)
    assert len(word) == 3 and word == D.realize_slope(d3.handle(1), (2, 3))
    assert D.canonical_key(E.replay(d3, word)) == D.canonical_key(target)
    swapped, _ = D.transpose_adjacent(d3, 1)
    word = E.connect_standard(d3, swapped)
    assert [s.get("name") for s in word if s["op"] == "macro"] == ["transpose"]


def test_connect_rejects_mismatch():
    with pytest.raises(ValueError):
        E.connect_standard(D.standard_double(SurfaceSig(2, 0)), D.standard_double(SurfaceSig(3, 0)))
    bent = D.flip_side(D.standard_double(SurfaceSig(2, 0)), "A", 2, Choice.CROSS)
    with pytest.raises(E.InvariantError):
        E.connect_standard(bent, D.standard_double(SurfaceSig(2, 0)))


@pytest.mark.parametrize("g,n", [(2, 0), (2, 1), (3, 0), (3, 2), (4, 1)])
def test_connect_random_pairs_and_inverse(g, n):
    rng = random.Random(g * 7 + n)
    sig = SurfaceSig(g, n)
    for _ in range(3):
        dp1 = E.random_strictly_standard(sig, rng)
        dp2 = E.random_strictly_standard(sig, rng)
        word = E.connect_standard(dp1, dp2)
        end = E.replay(dp1, word)
        assert D.canonical_key(end) == D.canonical_key(dp2)
        back = E.replay(end, E.inverse(dp1, word))
        assert D.canonical_key(back) == D.canonical_key(dp1)


def test_replay_reports_failing_step():
    dp = D.standard_double(SurfaceSig(2, 0))
    word = [{"op": "handle_twist", "handle": 1, "along": "a", "dir": 1},
            {"op": "flip", "side": "A", "edge": 0, "choice": "Cross"}]
    with pytest.raises(E.ReplayError) as info:
        E.replay(dp, word)
    assert info.value.index == 1
    with pytest.raises(E.ReplayError):
        E.replay(dp, [{"op": "teleport"}])


def test_macros_expand_to_primitives():
    dp = D.standard_double(SurfaceSig(3, 0))
    macro = [{"op": "macro", "name": "double_s", "handle": 2}, {"op": "macro", "name": "transpose", "position": 2}]
    flat = E.flatten(dp, macro)
    assert all(s["op"] != "macro" for s in flat)
    assert D.canonical_key(E.replay(dp, flat)) == D.canonical_key(E.replay(dp, macro))


def test_dehn_twist_macro_on_double_state():
    dp = D.standard_double(SurfaceSig(3, 1))
    step = {"op": "macro", "name": "dehn_twist", "side": "A", "edge": 5, "choice": "Cross"}
    assert D.canonical_key(E.replay(dp, [step])) == D.canonical_key(dp)


def test_twist_words_small_genus_exhaustive():
    # every twist word of length <= 3 on handle 1 inverts back to the start
    dp = D.standard_double(SurfaceSig(2, 0))
    letters = [{"op": "handle_twist", "handle": 1, "along": a, "dir": d} for a in "ab" for d in (1, -1)]
    for k in range(4):
        for word in itertools.product(letters, repeat=k):
            end = E.replay(dp, list(word))
            assert D.canonical_key(E.replay(end, E.inverse(dp, list(word)))) == D.canonical_key(dp)
