"""JSON state files for double pants decompositions.

Each edge record carries its curve token and one-level flip history, so a reloaded state flips
back exactly like the original.  Hand-written files may omit tokens; the listed matching then
determines which curves are shared.
"""

from __future__ import annotations

import json
from typing import Any

from .double import DoublePants, check_double
from .lattice import SurfaceSig
from .marking import MarkedPants, digest
from .pantsgraph import PantsGraph, edge_occ, leg_occ


class StateFormatError(ValueError):
    """The document is not a well-formed state file."""


class StateInvariantError(ValueError):
    """The document parses but describes an invalid state."""


def _side_doc(mp: MarkedPants) -> dict:
    gr = mp.graph
    vertices = []
    for trip in gr.slots:
        vertices.append([{"edge": o[1], "end": o[2]} if o[0] == "e" else {"leg": o[1]} for o in trip])
    edges = []
    for e in gr.edges:
        (u, i), (w, j) = gr.ends[e]
        rec = {"id": e, "ends": [[u, i], [w, j]], "signs": [1, -1], "class": list(mp.classes[e])}
        if e in mp.tokens:
            rec["token"] = mp.tokens[e]
        if mp.history.get(e):
            rec["history"] = _lists(mp.history[e])
        edges.append(rec)
    legs = [{"label": k, "at": list(v)} for k, v in sorted(gr.legs.items())]
    return {"vertices": vertices, "edges": edges, "legs": legs}


def _lists(x):
    return [_lists(y) for y in x] if isinstance(x, tuple) else x


def _tuples(x):
    return tuple(_tuples(y) for y in x) if isinstance(x, list) else x


def to_doc(dp: DoublePants) -> dict:
    handles = []
    for h in dp.handles():
        handles.append({
            "index": h.index, "loop_a": h.loop_a, "loop_b": h.loop_b,
            "boundary_a": h.boundary_a, "boundary_b": h.boundary_b,
            "slope_a": list(h.slope_a) if h.slope_a else None,
            "slope_b": list(h.slope_b) if h.slope_b else None,
        })
    return {
        "surface": {"genus": dp.sig.genus, "punctures": dp.sig.punctures},
        "side_a": _side_doc(dp.side_a),
        "side_b": _side_doc(dp.side_b),
        "matching": [list(p) for p in dp.matching()],
        "handles": handles,
        "bases": [[list(u), list(v)] for u, v in dp.bases],
        "order": list(dp.order),
    }


def dumps(dp: DoublePants) -> str:
    return json.dumps(to_doc(dp), indent=1, sort_keys=True) + "\n"


def _int(x: Any, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise StateFormatError(f"{what} must be an integer, got {x!r}")
    return x


def _load_side(doc: dict, sig: SurfaceSig, name: str):
    try:
        vertices = doc["vertices"]
        edge_docs = doc["edges"]
    except (KeyError, TypeError) as exc:
        raise StateFormatError(f"{name}: missing key {exc}") from exc
    slots = []
    for v, trip in enumerate(vertices):
        if not isinstance(trip, list) or len(trip) != 3:
            raise StateInvariantError(f"{name}: pants {v} does not have 3 slots")
        row = []
        for occ in trip:
            if not isinstance(occ, dict):
                raise StateFormatError(f"{name}: slot entries must be objects")
            if "leg" in occ:
                row.append(leg_occ(_int(occ["leg"], "leg label")))
            elif "edge" in occ and "end" in occ:
                row.append(edge_occ(_int(occ["edge"], "edge id"), _int(occ["end"], "edge end")))
            else:
                raise StateFormatError(f"{name}: slot entry {occ} names neither an edge nor a leg")
        slots.append(tuple(row))
    gr = PantsGraph(sig, tuple(slots))  # type: ignore[arg-type]
    classes, tokens, history = {}, {}, {}
    for ed in edge_docs:
        try:
            e = _int(ed["id"], "edge id")
            cls = tuple(_int(x, "class entry") for x in ed["class"])
            signs = ed.get("signs", [1, -1])
            ends = [tuple(p) for p in ed["ends"]]
        except (KeyError, TypeError) as exc:
            raise StateFormatError(f"{name}: malformed edge record {ed}") from exc
        if list(signs) != [1, -1]:
            raise StateInvariantError(f"{name}: edge {e} must carry signs [1, -1] on its two ends")
        if e in gr.ends and [tuple(x) for x in gr.ends[e]] != ends:
            raise StateInvariantError(f"{name}: edge {e} ends {ends} disagree with the slot table")
        classes[e] = cls
        if "token" in ed:
            if not isinstance(ed["token"], str):
                raise StateFormatError(f"{name}: edge {e} token must be a string")
            tokens[e] = ed["token"]
        if "history" in ed:
            history[e] = _tuples(ed["history"])
    if tokens and set(tokens) != set(classes):
        raise StateFormatError(f"{name}: tokens must be given for every edge or for none")
    return gr, classes, tokens, history


def from_doc(doc: dict) -> DoublePants:
    """Rebuild a state; raises StateFormatError or StateInvariantError (first violation)."""
    if not isinstance(doc, dict):
        raise StateFormatError("state file must hold a JSON object")
    try:
        surf = doc["surface"]
        sig = SurfaceSig(_int(surf["genus"], "genus"), _int(surf["punctures"], "punctures"))
    except (KeyError, TypeError) as exc:
        raise StateFormatError(f"missing key {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, StateFormatError):
            raise
        raise StateFormatError(str(exc)) from exc
    if "side_a" not in doc or "side_b" not in doc:
        raise StateFormatError("state file needs side_a and side_b")
    ga, ca, ta, ha = _load_side(doc["side_a"], sig, "side_a")
    gb, cb, tb, hb = _load_side(doc["side_b"], sig, "side_b")
    try:
        pairs = [(int(a), int(b)) for a, b in doc.get("matching", [])]
    except (TypeError, ValueError) as exc:
        raise StateFormatError(f"malformed matching: {exc}") from exc
    for a, b in pairs:
        if a not in ca or b not in cb:
            raise StateInvariantError(f"matching names unknown edges {a}/{b}")
    if not ta and not tb:
        ta = {e: digest("A", e) for e in ca}
        tb = {e: digest("B", e) for e in cb}
        for a, b in pairs:
            ta[a] = tb[b] = digest("pair", a, b)
    elif not ta or not tb:
        raise StateFormatError("tokens must be given on both sides or on neither")
    try:
        bases = tuple((tuple(u), tuple(v)) for u, v in doc["bases"])
        order = tuple(int(x) for x in doc["order"])
    except (KeyError, TypeError, ValueError) as exc:
        raise StateFormatError(f"malformed bases/order: {exc}") from exc
    dp = DoublePants(MarkedPants(ga, ca, ta, ha), MarkedPants(gb, cb, tb, hb), bases, order)
    if dp.matching() != sorted(pairs):
        raise StateInvariantError("listed matching disagrees with the shared curves")
    rep = check_double(dp)
    if not rep.ok:
        raise StateInvariantError(rep.first_failure() or "invariant failure")
    listed = doc.get("handles")
    if listed is not None:
        found = {h.loop_a: h for h in dp.handles()}
        for hd in listed:
            h = found.get(hd.get("loop_a"))
            if h is None:
                raise StateInvariantError(f"handle at A{hd.get('loop_a')} is not a handle of this state")
            for key in ("slope_a", "slope_b"):
                want = hd.get(key)
                have = getattr(h, key)
                if want is not None and (have is None or tuple(want) != have):
                    raise StateInvariantError(
                        f"handle {h.index}: {key} {want} disagrees with the loop class (expected {have})")
            sa, sb = hd.get("slope_a"), hd.get("slope_b")
            if sa is not None and sb is not None and abs(sa[0] * sb[1] - sa[1] * sb[0]) != 1:
                raise StateInvariantError(f"handle {h.index}: slopes {sa},{sb} do not meet once")
    return dp


def loads(text: str) -> DoublePants:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFormatError(f"invalid JSON: {exc}") from exc
    return from_doc(doc)
