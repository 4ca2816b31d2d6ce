"""Command-line front end: ``pants build|apply|check|orbit|standardize|connect``.

Exit codes: 0 success, 1 invariant failure (or no certificate found), 2 input error,
3 replay failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import engine, stateio, zipped
from .double import check_double, standard_double
from .lattice import SurfaceSig

OK, INVARIANT, INPUT, REPLAY = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(INPUT, f"cannot read {path}: {exc}") from exc


def _load_state(path: str):
    try:
        return stateio.loads(_read(path))
    except stateio.StateFormatError as exc:
        raise CliError(INPUT, f"{path}: {exc}") from exc
    except stateio.StateInvariantError as exc:
        raise CliError(INVARIANT, f"{path}: invariant violated: {exc}") from exc


def _load_script(path: str) -> list[dict]:
    try:
        doc = json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise CliError(INPUT, f"{path}: invalid JSON: {exc}") from exc
    if isinstance(doc, dict) and "steps" in doc:
        doc = doc["steps"]
    if not isinstance(doc, list) or not all(isinstance(s, dict) and "op" in s for s in doc):
        raise CliError(INPUT, f"{path}: a script is a JSON array of steps with an 'op' key")
    return doc


def _sig(args) -> SurfaceSig:
    try:
        return SurfaceSig(args.genus, args.punctures)
    except ValueError as exc:
        raise CliError(INPUT, str(exc)) from exc


def cmd_build(args) -> int:
    sig = _sig(args)
    if args.kind == "hexmap":
        if sig.punctures:
            raise CliError(INPUT, "hexagon maps are built for closed surfaces (-n 0)")
        try:
            hm = zipped.hexmap_standard(sig.genus)
        except ValueError as exc:
            raise CliError(INPUT, str(exc)) from exc
        _emit(json.dumps(zipped.to_json(hm), indent=1, sort_keys=True) + "\n", args.out)
        return OK
    _emit(stateio.dumps(standard_double(sig)), args.out)
    return OK


def cmd_apply(args) -> int:
    dp = _load_state(args.state)
    script = _load_script(args.script)
    try:
        out = engine.replay(dp, script)
    except engine.ReplayError as exc:
        raise CliError(REPLAY, f"replay failed at step {exc.index}: {exc.message}") from exc
    _emit(stateio.dumps(out), args.out)
    return OK


def cmd_check(args) -> int:
    dp = _load_state(args.state)
    rep = check_double(dp)
    print(rep.summary())
    if not rep.ok:
        print(rep.first_failure(), file=sys.stderr)
        return INVARIANT
    return OK


def orbit_dot(og: engine.OrbitGraph) -> str:
    ids = {k: f"n{i}" for i, k in enumerate(og.nodes)}
    lines = ["graph orbit {"]
    for k, info in og.nodes.items():
        shape = "box" if info["type"] == "non-self-folded" else "circle"
        lines.append(f'  {ids[k]} [shape={shape}, label="{ids[k]}", depth={info["depth"]}];')
    seen = set()
    for a, b, _ in og.arcs:
        pair = tuple(sorted((ids[a], ids[b]), key=lambda s: int(s[1:])))
        if a != b and pair not in seen:
            seen.add(pair)
            lines.append(f"  {pair[0]} -- {pair[1]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_orbit(args) -> int:
    dp = _load_state(args.state)
    start = dp if args.side == "double" else dp.side(args.side)
    og = engine.orbit_graph(start, args.depth, max_nodes=args.max_nodes)
    _emit(orbit_dot(og), args.out)
    if og.truncated:
        print(f"node budget exhausted; partial graph with {len(og.nodes)} nodes", file=sys.stderr)
    return OK


def cmd_standardize(args) -> int:
    dp = _load_state(args.state)
    try:
        word = engine.standardize(dp, args.budget)
    except engine.InvariantError as exc:
        raise CliError(INVARIANT, str(exc)) from exc
    if word is None:
        print(f"no flip word of length <= {args.budget} makes the state standard", file=sys.stderr)
        return INVARIANT
    _emit(json.dumps(word, indent=1) + "\n", args.out)
    return OK


def cmd_connect(args) -> int:
    dp1, dp2 = _load_state(args.state), _load_state(args.target)
    try:
        word = engine.connect_standard(dp1, dp2)
    except engine.InvariantError as exc:
        raise CliError(INVARIANT, str(exc)) from exc
    except ValueError as exc:
        raise CliError(INPUT, str(exc)) from exc
    except engine.ReplayError as exc:
        raise CliError(REPLAY, f"macro step {exc.index} failed: {exc.message}") from exc
    _emit(json.dumps(word, indent=1) + "\n", args.out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pants", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="write a standard state or hexagon map")
    b.add_argument("kind", choices=["standard", "strictly-standard", "hexmap"])
    b.add_argument("-g", "--genus", type=int, required=True)
    b.add_argument("-n", "--punctures", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_build)

    a = sub.add_parser("apply", help="replay a script on a state")
    a.add_argument("state")
    a.add_argument("script")
    a.add_argument("--out")
    a.set_defaults(func=cmd_apply)

    c = sub.add_parser("check", help="report invariants and counts")
    c.add_argument("state")
    c.set_defaults(func=cmd_check)

    o = sub.add_parser("orbit", help="export the flip orbit as DOT")
    o.add_argument("state")
    o.add_argument("--depth", type=int, default=2)
    o.add_argument("--side", choices=["A", "B", "double"], default="A")
    o.add_argument("--max-nodes", type=int, default=None)
    o.add_argument("--out")
    o.set_defaults(func=cmd_orbit)

    s = sub.add_parser("standardize", help="search a flip word to a standard state")
    s.add_argument("state")
    s.add_argument("--budget", type=int, default=6)
    s.add_argument("--out")
    s.set_defaults(func=cmd_standardize)

    k = sub.add_parser("connect", help="word between two strictly standard states")
    k.add_argument("state")
    k.add_argument("target")
    k.add_argument("--out")
    k.set_defaults(func=cmd_connect)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT if exc.code else OK
    try:
        return args.func(args)
    except CliError as exc:
        print(exc, file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
