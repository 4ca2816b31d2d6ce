"""Step lists transcribed as data and replayed with every precondition checked."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .double import DoublePants, DoubleReport, check_double, standard_double
from .engine import replay
from .lattice import SurfaceSig, unoriented

NAMES = ("double_s", "comp_for_twist", "comp_for_dflip", "cyclic_order", "obtain_twist")


def load_fixture(name: str) -> dict:
    text = resources.files("pantsflip").joinpath("fixtures", f"{name}.json").read_text()
    return json.loads(text)


@dataclass
class FixtureResult:
    name: str
    start: DoublePants
    end: DoublePants
    report: DoubleReport
    ok: bool
    problems: list[str]


def replay_fixture(name: str) -> FixtureResult:
    doc = load_fixture(name)
    sig = SurfaceSig(doc["surface"]["genus"], doc["surface"]["punctures"])
    start = standard_double(sig)
    end = replay(start, doc["steps"])
    rep = check_double(end)
    problems = []
    expect = doc.get("expect", {})
    if not rep.ok:
        problems.append(rep.first_failure() or "invariant failure")
    for flag in ("standard", "strictly_standard"):
        if flag in expect and getattr(rep, flag) != expect[flag]:
            problems.append(f"{flag} is {getattr(rep, flag)}")
    if "order" in expect and list(end.order) != expect["order"]:
        problems.append(f"order {end.order} != {expect['order']}")
    if "swapped_handle" in expect:
        h0, h1 = start.handle(expect["swapped_handle"]), end.handle(expect["swapped_handle"])
        if (unoriented(h1.slope_a), unoriented(h1.slope_b)) != (unoriented(h0.slope_b), unoriented(h0.slope_a)):
            problems.append("slopes were not swapped")
    return FixtureResult(name, start, end, rep, not problems, problems)
