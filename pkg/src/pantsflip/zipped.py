"""Zipped pants decompositions as hexagonal combinatorial maps.

A zipper system cuts the closed surface into two spheres with g+1 holes; only the positive half
S+ is stored.  Each pants meets S+ in one hexagon whose sides alternate between an arc of a curve
and a segment of a zipper circle.  A face is a 6-tuple of sides listed counter-clockwise:
``("c", curve, end)`` or ``("z", circle, 0)``.  The two sides carrying one curve label are glued to
each other (for a handle loop both lie in the same face).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .lattice import SurfaceSig
from .pantsgraph import FlipError, PantsGraph, Report, caterpillar

Side = tuple[str, int, int]
Pos = tuple[int, int]


@dataclass(frozen=True)
class HexMap:
    genus: int
    faces: tuple[tuple[Side, ...], ...]

    def curve_positions(self) -> dict[int, list[Pos]]:
        out: dict[int, list[Pos]] = {}
        for f, face in enumerate(self.faces):
            for p, s in enumerate(face):
                if s[0] == "c":
                    out.setdefault(s[1], []).append((f, p))
        return out

    def partner(self, f: int, p: int) -> Pos:
        label = self.faces[f][p][1]
        a, b = self.curve_positions()[label]
        return b if a == (f, p) else a

    def curves(self) -> list[int]:
        return sorted(self.curve_positions())


def _succ(hm: HexMap, pos: Pos, partners: dict[Pos, Pos]) -> Pos:
    # walk along a zipper circle: cross the arc at the end of this segment
    f, p = pos
    k = len(hm.faces[f])
    g, q = partners[(f, (p + 1) % k)]
    return g, (q + 1) % len(hm.faces[g])


def _partners(hm: HexMap) -> dict[Pos, Pos] | None:
    out = {}
    for a in hm.curve_positions().values():
        if len(a) != 2:
            return None
        out[a[0]], out[a[1]] = a[1], a[0]
    return out


def circles(hm: HexMap) -> list[list[Pos]]:
    partners = _partners(hm)
    if partners is None:
        raise ValueError("some curve does not form a single arc")
    seen: set[Pos] = set()
    out = []
    for f, face in enumerate(hm.faces):
        for p, s in enumerate(face):
            if s[0] == "z" and (f, p) not in seen:
                cyc = []
                cur = (f, p)
                while cur not in seen:
                    seen.add(cur)
                    cyc.append(cur)
                    cur = _succ(hm, cur, partners)
                out.append(cyc)
    return out


def validate_hexmap(hm: HexMap, closed: bool = True) -> Report:
    rep = Report()
    g = hm.genus
    rep.add("hexagons", all(len(f) == 6 for f in hm.faces), "a face is not a hexagon")
    alt = all(
        len(f) % 2 == 0 and all(f[i][0] != f[(i + 1) % len(f)][0] for i in range(len(f)))
        and all(s[0] in ("c", "z") for s in f)
        for f in hm.faces
    )
    rep.add("alternating", alt, "face sides do not alternate between curve and zipper")
    per_curve = hm.curve_positions()
    bad = sorted(c for c, ps in per_curve.items() if len(ps) != 2)
    rep.add("two_endpoints", not bad, f"curves {bad} do not meet the zipper in exactly 2 points")
    if not rep.ok:
        return rep
    cyc = circles(hm)
    labels_ok = all(len({hm.faces[f][p][1] for f, p in c}) == 1 for c in cyc)
    rep.add("circle_labels", labels_ok, "a zipper circle carries two labels")
    labels = sorted(hm.faces[c[0][0]][c[0][1]][1] for c in cyc)
    rep.add("circles", labels == list(range(g + 1)), f"zipper circles {labels}, expected z_0..z_{g}")
    v = sum(len(c) for c in cyc)
    e = len(per_curve) + v
    chi = v - e + len(hm.faces)
    rep.add("euler", chi == 1 - g, f"Euler characteristic {chi} != {1 - g}")
    if closed:
        rep.add("face_count", len(hm.faces) == 2 * g - 2, f"{len(hm.faces)} faces, expected {2 * g - 2}")
        rep.add("arc_count", len(per_curve) == 3 * g - 3, f"{len(per_curve)} arcs, expected {3 * g - 3}")
    # connectivity through glued arcs
    partners = _partners(hm)
    seen, todo = {0}, [0]
    while todo:
        f = todo.pop()
        for p in range(len(hm.faces[f])):
            if (f, p) in partners:
                f2 = partners[(f, p)][0]
                if f2 not in seen:
                    seen.add(f2)
                    todo.append(f2)
    rep.add("connected", len(seen) == len(hm.faces), "the map is disconnected")
    return rep


def hexmap_standard(g: int) -> HexMap:
    """The S+ map of the standard decomposition; z_i sits inside handle i, z_0 visits every handle."""
    if g < 2:
        raise ValueError(f"zipped maps need genus >= 2, got {g}")
    gr = caterpillar(SurfaceSig(g, 0))
    faces = []
    for trip in gr.slots:
        face: list[Side] = []
        for occ in trip:
            face += [("c", occ[1], occ[2]), ("z", -1, 0)]
        faces.append(tuple(face))
    draft = HexMap(g, tuple(faces))
    labels: dict[Pos, int] = {}
    rest: list[list[Pos]] = []
    for cyc in circles(draft):
        f, p = cyc[0]
        face = draft.faces[f]
        if len(cyc) == 1 and face[(p + 1) % 6][1] == face[(p - 1) % 6][1]:
            # the segment between the two sides of a loop: the circle inside that handle
            for pos in cyc:
                labels[pos] = face[(p + 1) % 6][1] + 1
        else:
            rest.append(cyc)
    if len(rest) != 1:
        raise AssertionError(f"expected a single principle circle, found {len(rest)}")
    for pos in rest[0]:
        labels[pos] = 0
    out = tuple(
        tuple(("z", labels[(f, p)], 0) if s[0] == "z" else s for p, s in enumerate(face))
        for f, face in enumerate(draft.faces)
    )
    return HexMap(g, out)


def octagon(hm: HexMap, label: int) -> tuple[int, int, list[Side]]:
    """Merge the two faces along ``label``: (face F, face G, the 8 sides starting at zipper Z2)."""
    pos = hm.curve_positions().get(label)
    if pos is None or len(pos) != 2:
        raise FlipError(f"{label} is not a curve of this map")
    (f, p), (g, q) = pos
    if f == g:
        raise FlipError(f"curve {label} is a non-regular curve (both sides lie in one hexagon)")
    F = lambda k: hm.faces[f][(p + k) % 6]  # noqa: E731
    G = lambda k: hm.faces[g][(q + k) % 6]  # noqa: E731
    if F(1)[1] != G(5)[1] or F(5)[1] != G(1)[1]:
        raise AssertionError("zipper segments meeting at an arc endpoint lie on different circles")
    return f, g, [F(1), F(2), F(3), F(4), F(5), G(2), G(3), G(4)]


def split_chord(oct_sides: list[Side], i: int, j: int, chord: Side, chord_back: Side):
    """Cut the octagon along a chord joining zipper sides i < j; returns the two pieces."""
    first = [chord, oct_sides[i]] + oct_sides[i + 1:j] + [oct_sides[j]]
    second = [chord_back, oct_sides[j]] + oct_sides[j + 1:] + oct_sides[:i] + [oct_sides[i]]
    return first, second


def admissible_chords(oct_sides: list[Side]) -> list[tuple[int, int]]:
    """Chords between zipper sides that cut the octagon into two alternating hexagons."""
    zs = [k for k, s in enumerate(oct_sides) if s[0] == "z"]
    out = []
    for a in range(len(zs)):
        for b in range(a + 1, len(zs)):
            i, j = zs[a], zs[b]
            p1, p2 = split_chord(oct_sides, i, j, ("c", -1, 0), ("c", -1, 1))
            if all(len(p) == 6 and all(p[k][0] != p[(k + 1) % 6][0] for k in range(6)) for p in (p1, p2)):
                out.append((i, j))
    return out


def zipped_flip(hm: HexMap, label: int) -> HexMap:
    f, g, octo = octagon(hm, label)
    chords = admissible_chords(octo)
    # the deleted arc joined the two merged segments Z2 (index 0) and Z1 (index 4)
    if len(chords) != 2 or (0, 4) not in chords:
        raise AssertionError(f"octagon of curve {label} has admissible chords {chords}")
    i, j = next(c for c in chords if c != (0, 4))
    first, second = split_chord(octo, i, j, ("c", label, 0), ("c", label, 1))
    faces = list(hm.faces)
    faces[f], faces[g] = tuple(first), tuple(second)
    return HexMap(hm.genus, tuple(faces))


def regular_curves(hm: HexMap) -> list[int]:
    return [c for c, ps in sorted(hm.curve_positions().items()) if ps[0][0] != ps[1][0]]


def project_to_graph(hm: HexMap) -> PantsGraph:
    slots = []
    for face in hm.faces:
        slots.append(tuple(("e", s[1], s[2]) for s in face if s[0] == "c"))
    gr = PantsGraph(SurfaceSig(hm.genus, 0), tuple(slots))  # type: ignore[arg-type]
    return gr


def _walk(hm: HexMap, f0: int, p0: int, partners: dict[Pos, Pos]):
    """Encoding of the map explored from face f0 read from side p0 (rotation only, no mirror)."""
    num = {f0: 0}
    start = {f0: p0}
    queue = [f0]
    rows = []
    k = 0
    while k < len(queue):
        f = queue[k]
        k += 1
        row = []
        for d in range(6):
            p = (start[f] + d) % 6
            s = hm.faces[f][p]
            if s[0] == "z":
                row.append(("z", s[1]))
                continue
            g, q = partners[(f, p)]
            if g not in num:
                num[g] = len(queue)
                start[g] = q
                queue.append(g)
            row.append(("c", s[1], num[g], (q - start[g]) % 6))
        rows.append(tuple(row))
    return tuple(rows)


def canonical_key(hm: HexMap, with_labels: bool = True) -> str:
    """Invariant under renumbering faces and rotating them; labels of curves kept by default."""
    target = hm if with_labels else HexMap(
        hm.genus, tuple(tuple((s[0], 0 if s[0] == "c" else s[1], 0) for s in face) for face in hm.faces)
    )
    partners = _partners(hm)
    best = min(_walk(target, f, p, partners) for f in range(len(hm.faces)) for p in range(0, 6)
               if hm.faces[f][p][0] == "c")
    return repr((hm.genus, best))


def zipped_orbit(start: HexMap, depth: int, with_labels: bool = True) -> Iterator[tuple[int, HexMap]]:
    """Breadth-first zipped flips from ``start``; yields (depth, state) once per canonical key."""
    seen = {canonical_key(start, with_labels)}
    level = [start]
    for d in range(depth + 1):
        nxt = []
        for hm in level:
            yield d, hm
            if d == depth:
                continue
            for c in regular_curves(hm):
                h2 = zipped_flip(hm, c)
                k = canonical_key(h2, with_labels)
                if k not in seen:
                    seen.add(k)
                    nxt.append(h2)
        level = nxt


def to_json(hm: HexMap) -> dict:
    return {"genus": hm.genus, "faces": [[list(s) for s in face] for face in hm.faces]}


def from_json(doc: dict) -> HexMap:
    return HexMap(int(doc["genus"]), tuple(tuple((str(s[0]), int(s[1]), int(s[2])) for s in face)
                                           for face in doc["faces"]))
