"""Canonical labeling of small vertex-colored multigraphs by individualization-refinement."""

from __future__ import annotations

from typing import Hashable, Sequence


def _refine(cells: list[int], adj: Sequence[Sequence[int]]) -> list[int]:
    while True:
        sigs = [(cells[v], tuple(sorted(cells[w] for w in adj[v]))) for v in range(len(adj))]
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(ranks) == len(set(cells)):
            return new
        cells = new


def _encode(order: Sequence[int], colors: Sequence[str], adj: Sequence[Sequence[int]]):
    pos = {v: i for i, v in enumerate(order)}
    edges = []
    for v in range(len(adj)):
        for w in adj[v]:
            if pos[v] <= pos[w]:
                edges.append((pos[v], pos[w]))
    return tuple(colors[v] for v in order), tuple(sorted(edges))


def canonical_labeling(colors: Sequence[Hashable], adj: Sequence[Sequence[int]]):
    """Return ``(key, order)``: a complete isomorphism invariant and a canonical vertex order.

    ``adj[v]`` lists neighbours with multiplicity; a self-loop at v appears twice in ``adj[v]``
    and is encoded once per occurrence pair.  Two colored multigraphs have equal keys iff they are
    isomorphic by a color-preserving map; positions in ``order`` correspond under any such map.
    """
    scolors = [repr(c) for c in colors]
    ranks = {c: i for i, c in enumerate(sorted(set(scolors)))}
    start = _refine([ranks[c] for c in scolors], adj)
    best = [None, None]

    def search(cells: list[int]):
        counts: dict[int, int] = {}
        for c in cells:
            counts[c] = counts.get(c, 0) + 1
        ties = [c for c, k in counts.items() if k > 1]
        if not ties:
            order = sorted(range(len(cells)), key=lambda v: cells[v])
            enc = _encode(order, scolors, adj)
            if best[0] is None or enc < best[0]:
                best[0], best[1] = enc, order
            return
        target = min(ties)
        for v in [v for v in range(len(cells)) if cells[v] == target]:
            # split v off in front of its cell; doubling keeps the cell order intact
            split = [2 * c + (1 if c == target and u != v else 0) for u, c in enumerate(cells)]
            search(_refine(split, adj))

    search(start)
    return best[0], best[1]
