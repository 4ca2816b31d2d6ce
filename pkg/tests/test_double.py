import itertools
import random
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pantsflip import double as D
from pantsflip import engine as E
from pantsflip.lattice import SurfaceSig, spans_full, unoriented
from pantsflip.pantsgraph import Choice, FlipError


def state(g, n=0):
    return D.standard_double(SurfaceSig(g, n))


def unimodular_pairs(bound):
    rng = range(-bound, bound + 1)
    for a in itertools.product(rng, rng):
        for b in itertools.product(rng, rng):
            if abs(a[0] * b[1] - a[1] * b[0]) == 1:
                yield a, b


@pytest.mark.parametrize("g,curves", [(2, 5), (3, 9)])
def test_standard_double_counts(g, curves):
    rep = D.check_double(state(g))
    assert rep.curves == curves and rep.intersections == g
    assert rep.general_position and rep.standard and rep.strictly_standard


def test_standard_double_with_puncture():
    assert D.check_double(state(2, 1)).ok
    assert D.check_double(state(3, 2)).ok


def test_check_double_examples():
    rep = D.check_double(state(2))
    assert rep.summary() == "curves=5 intersections=2 general_position=true standard=true strictly_standard=true"
    # the spine curve between the two trivalent pants of (3,1) flipped on one side only
    one_side = D.flip_side(state(3, 1), "A", 5, Choice.CROSS)
    rep = D.check_double(one_side)
    assert rep.standard and not rep.strictly_standard
    degenerate = D.with_slopes(state(2), 1, (1, 0), (1, 0))
    rep = D.check_double(degenerate)
    assert not rep.general_position and "span" in rep.first_failure()


def test_handle_twist_examples():
    dp = D.handle_twist(state(2), 1, "a", 1)
    assert (dp.handle(1).slope_a, dp.handle(1).slope_b) == ((1, 0), (1, 1))
    dp = D.handle_twist(dp, 1, "b", -1)
    h = dp.handle(1)
    assert unoriented(h.slope_a) == (0, 1) and h.slope_b == (1, 1)
    assert D.check_double(dp).strictly_standard
    with pytest.raises((ValueError, FlipError)):
        D.handle_twist(state(2), 1, "c", 1)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.sampled_from([1, 2]), st.sampled_from("ab"), st.sampled_from([1, -1])), max_size=12))
def test_twists_preserve_det_and_general_position(word):
    dp = state(2)
    for h, along, d in word:
        dp = D.handle_twist(dp, h, along, d)
    for h in dp.handles():
        assert abs(h.det) == 1
    rep = D.check_double(dp)
    assert rep.general_position and rep.strictly_standard
    stacked = list(dp.side_a.classes.values()) + list(dp.side_b.classes.values())
    assert spans_full(stacked, 4)


def test_double_s_word_is_certified():
    assert [(s["along"], s["dir"]) for s in D.double_s_move(state(2), 1)[1]] == [("a", 1), ("b", -1), ("a", 1)]


@pytest.mark.parametrize("sa,sb", [((1, 0), (0, 1)), ((1, 1), (0, 1))])
def test_double_s_examples(sa, sb):
    dp = D.with_slopes(state(2), 1, sa, sb)
    out, _ = D.double_s_move(dp, 1)
    h = out.handle(1)
    assert unoriented(h.slope_a) == unoriented(sb) and unoriented(h.slope_b) == unoriented(sa)
    again, _ = D.double_s_move(out, 1)
    h2 = again.handle(1)
    assert unoriented(h2.slope_a) == unoriented(sa) and unoriented(h2.slope_b) == unoriented(sb)


def test_double_s_word_by_exhaustive_oracle():
    # all 4^3 three-letter twist words on (1,0),(0,1); the certified one must be among those that swap
    letters = [(a, d) for a in "ab" for d in (1, -1)]
    swapping = []
    for word in itertools.product(letters, repeat=3):
        x, y = (1, 0), (0, 1)
        for along, d in word:
            if along == "a":
                y = (y[0] + d * x[0], y[1] + d * x[1])
            else:
                x = (x[0] + d * y[0], x[1] + d * y[1])
        if unoriented(x) == (0, 1) and unoriented(y) == (1, 0):
            swapping.append(word)
    assert tuple(D.DOUBLE_S_WORD) in swapping


def test_double_s_on_all_small_pairs():
    base = state(2)
    for sa, sb in unimodular_pairs(3):
        out, _ = D.double_s_move(D.with_slopes(base, 1, sa, sb), 1)
        h = out.handle(1)
        assert (unoriented(h.slope_a), unoriented(h.slope_b)) == (unoriented(sb), unoriented(sa))


def test_realize_slope_examples():
    dp = state(2)
    h = dp.handle(1)
    assert D.realize_slope(h, (1, 0)) == []
    w = D.realize_slope(h, (0, 1))
    assert [(s["along"], s["dir"]) for s in w] == list(D.DOUBLE_S_WORD)
    w = D.realize_slope(h, (2, 3))
    assert [(s["along"], s["dir"]) for s in w] == [("b", 1), ("a", 1), ("b", 1)]
    assert E.replay(dp, w).handle(1).slope_a == (2, 3)
    with pytest.raises(ValueError):
        D.realize_slope(h, (2, 4))


def test_realize_slope_reaches_small_targets():
    dp = state(2)
    h = dp.handle(1)
    for x in range(-6, 7):
        for y in range(-6, 7):
            if (x, y) != (0, 0) and gcd(x, y) == 1:
                out = E.replay(dp, D.realize_slope(h, (x, y))).handle(1)
                assert unoriented(out.slope_a) == unoriented((x, y))
                assert abs(out.det) == 1


def test_double_flip_examples():
    dp = state(3, 1)
    step = {"op": "double_flip", "edge": 5, "choice": "Cross"}
    out = E.replay(dp, [step])
    rep = D.check_double(out)
    # the new curve is shared by both sides, so nothing outside the handles is left unmatched
    assert rep.standard and rep.strictly_standard and rep.general_position
    back = E.replay(out, E.inverse(dp, [step]))
    assert D.canonical_key(back) == D.canonical_key(dp)


def test_double_flip_refuses_handle_boundary_genus_two():
    with pytest.raises(FlipError):
        D.double_flip(state(2), 2, Choice.CROSS)


@pytest.mark.parametrize("sig", [(3, 0), (3, 1), (4, 0), (2, 2)])
def test_double_flips_preserve_general_position(sig):
    rng = random.Random(hash(sig) & 0xFFFF)
    dp = state(*sig)
    for _ in range(15):
        opts = []
        for e in dp.side_a.graph.edges:
            for c in Choice:
                try:
                    D.partner_choice(dp, e, c)
                except FlipError:
                    continue
                opts.append((e, c))
        if not opts:
            break
        dp = D.double_flip(dp, *rng.choice(opts))
        rep = D.check_double(dp)
        assert rep.general_position and rep.standard, rep.first_failure()


def test_transpose_examples():
    dp = state(3)
    out, word = D.transpose_adjacent(dp, 1)
    assert out.order == (2, 1, 3) and D.check_double(out).strictly_standard
    assert E.replay(dp, word).order == (2, 1, 3)
    twice, _ = D.transpose_adjacent(out, 1)
    assert twice.order == dp.order and D.canonical_key(twice) == D.canonical_key(dp)


def test_transpositions_generate_all_orders_genus_four():
    dp = state(4)
    seen = {dp.order}
    frontier = [dp]
    while frontier:
        nxt = []
        for cur in frontier:
            for pos in (1, 2, 3):
                out, _ = D.transpose_adjacent(cur, pos)
                if out.order not in seen:
                    seen.add(out.order)
                    nxt.append(out)
        frontier = nxt
    assert len(seen) == 24
