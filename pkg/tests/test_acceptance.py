"""End-to-end acceptance checks, one test per criterion, each printing a PASS/FAIL line."""

import itertools
import random
import time
from contextlib import contextmanager
from math import gcd

from conftest import CRITERIA
from pantsflip import double as D
from pantsflip import engine as E
from pantsflip import zipped as Z
from pantsflip.fixtures import NAMES, replay_fixture
from pantsflip.lattice import SurfaceSig, unoriented
from pantsflip.marking import canonical_key, dehn_twist_word, flip_marked, lagrangian_of
from pantsflip.pantsgraph import Choice, flip_graph, labeled_key


@contextmanager
def criterion(number, title, budget=None):
    t0 = time.perf_counter()
    status = "FAIL"
    try:
        yield
        elapsed = time.perf_counter() - t0
        if budget is not None:
            assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - t0
        line = f"criterion {number}: {status} {title} ({elapsed:.2f}s)"
        CRITERIA.append(line)
        print(line)


def unimodular_pairs(bound):
    rng = range(-bound, bound + 1)
    for a in itertools.product(rng, rng):
        for b in itertools.product(rng, rng):
            if abs(a[0] * b[1] - a[1] * b[0]) == 1:
                yield a, b


def test_criterion_01_genus_two_orbit():
    with criterion(1, "genus-2 orbit degrees 6 and 2", budget=10):
        og = E.orbit_graph(E.theta_marked(), 4)
        assert og.expanded and not og.truncated
        for key in og.expanded:
            want = 6 if og.nodes[key]["type"] == "non-self-folded" else 2
            assert og.degree(key) == want, (og.nodes[key], og.degree(key))
        assert {og.nodes[k]["type"] for k in og.expanded} == {"non-self-folded", "self-folded"}


def test_criterion_02_lagrangian_invariance():
    with criterion(2, "Lagrangian plane invariant under 1000 flip words", budget=30):
        rng = random.Random(2)
        for trial in range(1000):
            sig = SurfaceSig(2 + trial % 3, rng.randint(0, 2))
            mp = E.random_marking(sig, rng)
            lag = lagrangian_of(mp)
            for _ in range(rng.randint(0, 20)):
                edges = [e for e in mp.graph.edges if not mp.graph.is_loop(e)]
                mp = flip_marked(mp, rng.choice(edges), rng.choice(list(Choice)))
            assert lagrangian_of(mp) == lag


def test_criterion_03_double_s_move():
    with criterion(3, "double S-move swaps slopes for all pairs of norm <= 10", budget=5):
        base = D.standard_double(SurfaceSig(2, 0))
        count = 0
        for sa, sb in unimodular_pairs(10):
            out, word = D.double_s_move(D.with_slopes(base, 1, sa, sb), 1)
            assert len(word) == 3
            h = out.handle(1)
            assert (unoriented(h.slope_a), unoriented(h.slope_b)) == (unoriented(sb), unoriented(sa))
            count += 1
        assert count > 1000


def test_criterion_04_dehn_twist_macro():
    with criterion(4, "two-flip Dehn twist fixes the marked state in 100 settings"):
        rng = random.Random(4)
        for _ in range(100):
            sig = SurfaceSig(rng.randint(2, 4), rng.randint(0, 2))
            mp = E.random_marking(sig, rng)
            e = rng.choice([e for e in mp.graph.edges if not mp.graph.is_loop(e)])
            out = mp
            for edge, c in dehn_twist_word(mp, e, rng.choice(list(Choice))):
                out = flip_marked(out, edge, c)
            assert canonical_key(out) == canonical_key(mp)


def test_criterion_05_slope_realization():
    with criterion(5, "realize_slope reaches every primitive target of norm <= 10"):
        dp = D.standard_double(SurfaceSig(2, 0))
        h = dp.handle(1)
        for x, y in itertools.product(range(-10, 11), repeat=2):
            if (x, y) == (0, 0) or gcd(x, y) != 1:
                continue
            end = E.replay(dp, D.realize_slope(h, (x, y))).handle(1)
            assert unoriented(end.slope_a) == unoriented((x, y)) and abs(end.det) == 1
        word = D.realize_slope(h, (2, 3))
        assert len(word) == 3 and E.replay(dp, word).handle(1).slope_a == (2, 3)


def test_criterion_06_strictly_standard_counts():
    with criterion(6, "standard_double(g,0) has 4g-3 curves and g intersections"):
        for g in range(2, 7):
            rep = D.check_double(D.standard_double(SurfaceSig(g, 0)))
            assert (rep.curves, rep.intersections) == (4 * g - 3, g)
            assert rep.strictly_standard


def test_criterion_07_zipped_uniqueness():
    with criterion(7, "octagon merges have exactly 2 re-splits, one the old arc", budget=10):
        merges = 0
        for g in (2, 3):
            for _, hm in Z.zipped_orbit(Z.hexmap_standard(g), 50, with_labels=False):
                for c in Z.regular_curves(hm):
                    _, _, octo = Z.octagon(hm, c)
                    chords = Z.admissible_chords(octo)
                    assert len(chords) == 2 and (0, 4) in chords
                    out = Z.zipped_flip(hm, c)
                    assert Z.validate_hexmap(out).ok
                    assert Z.canonical_key(Z.zipped_flip(out, c)) == Z.canonical_key(hm)
                    merges += 1
        assert merges > 0


def test_criterion_08_naturality():
    with criterion(8, "projection commutes with flips on the depth-3 zipped orbit at g=2"):
        states = 0
        for _, hm in Z.zipped_orbit(Z.hexmap_standard(2), 3):
            gr = Z.project_to_graph(hm)
            for c in Z.regular_curves(hm):
                image = labeled_key(Z.project_to_graph(Z.zipped_flip(hm, c)))
                assert image in {labeled_key(flip_graph(gr, c, ch)) for ch in Choice}
            states += 1
        assert states > 1


def random_target(sig, rng):
    dp = E.random_strictly_standard(sig, rng, flips=rng.randint(0, 8), twists=0, shuffles=rng.randint(0, 4))
    pairs = list(unimodular_pairs(5))
    for h in dp.handles():
        dp = D.with_slopes(dp, h.index, *rng.choice(pairs))
    assert D.check_double(dp).strictly_standard
    return dp


def test_criterion_09_connection():
    with criterion(9, "connect_standard joins 50 random strictly standard pairs", budget=60):
        rng = random.Random(9)
        for trial in range(50):
            sig = SurfaceSig(2 + trial % 3, rng.randint(0, 2))
            dp1, dp2 = random_target(sig, rng), random_target(sig, rng)
            word = E.connect_standard(dp1, dp2)
            assert D.canonical_key(E.replay(dp1, word)) == D.canonical_key(dp2)


def admissible_samples(rng, count, budget):
    """Non-standard genus-2 states with a certificate within ``budget`` and a twistable handle."""
    dp0 = D.standard_double(SurfaceSig(2, 1))
    out = []
    while len(out) < count:
        cur = dp0
        for _ in range(rng.randint(1, 3)):
            side = rng.choice("AB")
            keep = [h for h in cur.handles() if h.index == 2]
            if not keep:
                break
            avoid = keep[0].boundary_a if side == "A" else keep[0].boundary_b
            mp = cur.side(side)
            edges = [e for e in mp.graph.edges if not mp.graph.is_loop(e) and e != avoid]
            cur = D.flip_side(cur, side, rng.choice(edges), rng.choice(list(Choice)))
        rep = D.check_double(cur)
        if not rep.ok or rep.standard or not any(h.index == 2 for h in cur.handles()):
            continue
        if E.standardize(cur, budget) is not None:
            out.append(cur)
    return out


def test_criterion_10_twists_preserve_admissibility():
    budget = 8
    with criterion(10, "standardize succeeds after a handle twist within B+6", budget=120):
        rng = random.Random(10)
        for dp in admissible_samples(rng, 30, budget):
            twisted = D.handle_twist(dp, 2, rng.choice("ab"), rng.choice((1, -1)))
            word = E.standardize(twisted, budget + 6)
            assert word is not None
            assert D.check_double(E.replay(twisted, word)).standard
        # on the closed genus-2 surface only standard states carry a twistable handle
        closed = D.standard_double(SurfaceSig(2, 0))
        for along, d in itertools.product("ab", (1, -1)):
            assert E.standardize(D.handle_twist(closed, 1, along, d), budget + 6) == []


def test_criterion_11_fixture_replays():
    with criterion(11, f"{len(NAMES)} fixtures replay to standard endpoints"):
        for name in NAMES:
            res = replay_fixture(name)
            assert res.ok, (name, res.problems)
            assert res.report.standard, name
