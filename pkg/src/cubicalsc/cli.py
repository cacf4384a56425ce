"""Command-line entry point.

Every command reads input files, writes one JSON document with a ``status``
field and returns an exit code: 0 certified or valid, 1 refuted or invalid,
2 indeterminate, 3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable

from . import artin as A
from .complex_core import (
    ComplexError,
    NotNPC,
    Stuck,
    carrier,
    check_npc,
    collapse_to_point,
    convex_hull,
    describe,
    hyperplanes,
    is_convex,
    replay,
    separation,
    validate,
)
from .complex_core.hyperplanes import hyperplane_of_edge
from .diagrams import (
    PreconditionNotCertified,
    boundary_features,
    check_dichotomy,
    dual_curves,
    is_reduced,
    pathologies,
    reduce_diagram,
    validate_diagram,
)
from .io import InputFileNotFound, Loader, read_json
from .maps import RelatorNotGraph, check_minimal, check_symmetric, fiber_product
from .morphisms import check_local_isometry
from .presentation import BudgetExceeded, _fmt_path, check_cn, piece_bound

OK, REFUTED, INDETERMINATE, INPUT_ERROR = 0, 1, 2, 3

EXIT = {
    "Valid": OK, "NPC": OK, "Certified": OK, "OK": OK, "Bounded": OK, "LocalIsometry": OK,
    "Convex": OK, "Reduced": OK, "PASS": OK, "Verified": OK, "Degenerate": OK, "Holds": OK,
    "Invalid": REFUTED, "NotNPC": REFUTED, "Refuted": REFUTED, "NotLocalIsometry": REFUTED,
    "NotConvex": REFUTED, "FAIL": REFUTED, "Unbounded": REFUTED, "Fails": REFUTED,
    "Indeterminate": INDETERMINATE, "Undischarged": INDETERMINATE, "NotVerified": INDETERMINATE,
    "Stuck": INDETERMINATE, "InputError": INPUT_ERROR,
}


class UnknownCommand(Exception):
    pass


class BadFlag(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise BadFlag(message)

    def exit(self, status=0, message=None):
        # --help lands here; treat it as a request for usage text
        raise BadFlag(message or self.format_usage())


def _parser(prog: str, files: int | str = 1) -> _Parser:
    p = _Parser(prog=f"cubicalsc {prog}", add_help=False)
    p.add_argument("inputs", nargs=files)
    p.add_argument("--format", choices=("compact", "pretty"), default="compact")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", "-o")
    return p


def _pmap(fn: Callable, items: list, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _status(flag: bool, yes: str = "Certified", no: str = "Refuted") -> str:
    return yes if flag else no


# ---------------------------------------------------------------------------
# complex commands


def cmd_validate(args, L: Loader) -> dict:
    raw = read_json(args.inputs[0])
    try:
        X = validate(raw)
    except ComplexError as exc:
        return {"status": "Invalid", "error": exc.as_dict()}
    return {"status": "Valid", "dim": X.dimension, "cells_by_dimension": [len(X.of_dim(k)) for k in range(4)],
            "connected": X.is_connected(), "euler_characteristic": X.euler_characteristic()}


def cmd_npc(args, L: Loader) -> dict:
    return check_npc(L.complex(args.inputs[0])).as_dict()


def cmd_hyperplanes(args, L: Loader) -> dict:
    hs = hyperplanes(L.complex(args.inputs[0]))
    return {"status": "OK", "count": len(hs), "hyperplanes": [h.as_dict() for h in hs]}


def _selected(X, edge: str | None):
    hs = hyperplanes(X)
    if edge is None:
        return hs
    if edge not in X.edges:
        raise ComplexError(f"unknown edge {edge!r}", edge)
    return [hyperplane_of_edge(hs, edge)]


def cmd_carrier(args, L: Loader) -> dict:
    X = L.complex(args.inputs[0])
    out = _pmap(lambda H: carrier(X, H).as_dict(), _selected(X, args.edge), args.jobs)
    return {"status": "OK", "carriers": out}


def cmd_separate(args, L: Loader) -> dict:
    X = L.complex(args.inputs[0])

    def one(H):
        parts = separation(X, H)
        return {"hyperplane": H.id, "components": len(parts),
                "cells": [sorted(S.cells) for S in parts]}

    out = _pmap(one, _selected(X, args.edge), args.jobs)
    return {"status": "OK", "separations": out,
            "all_two_sided": all(r["components"] == 2 for r in out)}


def cmd_hull(args, L: Loader) -> dict:
    X = L.complex(args.inputs[0])
    cells = [c for c in args.cells.split(",") if c]
    for c in cells:
        if c not in X.cells:
            raise ComplexError(f"unknown cell {c!r}", c)
    H = convex_hull(X, cells)
    return {"status": is_convex(X, H).as_dict()["status"], "cells": sorted(H.cells),
            "complex": describe(H.complex())}


def cmd_collapse(args, L: Loader) -> dict:
    X = L.complex(args.inputs[0])
    try:
        res = collapse_to_point(X)
    except NotNPC as exc:
        return {"status": "Indeterminate", "reason": str(exc)}
    d = res.as_dict()
    if isinstance(res, Stuck):
        # no free face left at all: nothing can ever collapse further
        if not res.free_faces:
            d["status"] = "Refuted"
        return d
    if args.verify:
        rep = replay(X, res)
        d["replay"] = {"ok": rep.ok, "failed_step": rep.failed_step, "reason": rep.reason}
        if not rep.ok:
            d["status"] = "Refuted"
    return d


# ---------------------------------------------------------------------------
# maps and presentations


def cmd_map_check(args, L: Loader) -> dict:
    try:
        f = L.map(args.inputs[0])
    except ComplexError as exc:
        return {"status": "Invalid", "error": exc.as_dict()}
    v = check_local_isometry(f).as_dict()
    return {**v, "map": f.describe()}


def cmd_fiber(args, L: Loader) -> dict:
    f = L.map(args.inputs[0])
    g = L.map(args.inputs[1])
    return fiber_product(f, g).as_dict()


def _relator_checks(fn):
    def cmd(args, L: Loader) -> dict:
        p = L.presentation(args.inputs[0])
        try:
            rows = fn(p)
        except RelatorNotGraph as exc:
            return {"status": "Indeterminate", "reason": str(exc)}
        return {"status": _status(all(r.holds for r in rows), "Holds", "Fails"),
                "relators": [r.as_dict() for r in rows]}
    return cmd


def cmd_pieces(args, L: Loader) -> dict:
    p = L.presentation(args.inputs[0])
    return {"status": "OK", "pieces": [P.as_dict() for P in p.pieces]}


def cmd_piece_bound(args, L: Loader) -> dict:
    return piece_bound(L.presentation(args.inputs[0])).as_dict()


def cmd_check_cn(args, L: Loader) -> dict:
    p = L.presentation(args.inputs[0])
    try:
        return check_cn(p, args.n, args.budget).as_dict()
    except (RelatorNotGraph, BudgetExceeded) as exc:
        return {"status": "Indeterminate", "n": args.n, "reason": str(exc)}


# ---------------------------------------------------------------------------
# diagrams


def _diagram(args, L: Loader):
    raw, p = L.diagram_source(args.inputs[0], args.presentation)
    return validate_diagram(raw, p), p


def cmd_diagram_validate(args, L: Loader) -> dict:
    raw, p = L.diagram_source(args.inputs[0], args.presentation)
    try:
        D = validate_diagram(raw, p)
    except ComplexError as exc:
        return {"status": "Invalid", "error": exc.as_dict()}
    return {"status": "Valid", "kind": D.kind, "complexity": list(D.complexity), "euler": D.euler()}


def cmd_diagram_reduce(args, L: Loader) -> dict:
    D, p = _diagram(args, L)
    res = reduce_diagram(D, p)
    return {**res.as_dict(), "diagram": res.diagram.as_dict()}


def cmd_diagram_features(args, L: Loader) -> dict:
    D, p = _diagram(args, L)
    ok, _ = is_reduced(D, p)
    return {"status": "OK", "reduced": ok,
            "pathologies": [x.as_dict() for x in pathologies(D, p)],
            "dual_curves": [c.as_dict() for c in dual_curves(D)],
            "boundary": boundary_features(D, p).as_dict()}


def cmd_diagram_dichotomy(args, L: Loader) -> dict:
    D, p = _diagram(args, L)
    try:
        return check_dichotomy(D, p, budget=args.budget).as_dict()
    except (PreconditionNotCertified, RelatorNotGraph, BudgetExceeded) as exc:
        return {"status": "Indeterminate", "reason": str(exc)}


# ---------------------------------------------------------------------------
# Artin groups


def cmd_artin_build(args, L: Loader) -> dict:
    G = L.graph(args.inputs[0])
    rels = []
    for u, v, m in G.finite_edges():
        path = _fmt_path(A._relator_steps(u, v, m))
        rels.append({"edge": [u, v], "m": m, "relator": path, "length": len(path)})
    return {"status": "OK", "graph": G.as_dict(), "base": describe(A.build_rose(G)), "relators": rels}


def cmd_artin_profile(args, L: Loader) -> dict:
    return A.artin_piece_profile(L.graph(args.inputs[0]), args.radius).as_dict()


def cmd_artin_certify(args, L: Loader) -> dict:
    G = L.graph(args.inputs[0])
    try:
        return A.certify_artin_cn(G, args.n, args.radius).as_dict()
    except A.ProfileNotVerified as exc:
        return {"status": "Indeterminate", "n": args.n, "reason": str(exc)}


# ---------------------------------------------------------------------------
# dispatch


def _command(fn, files=1, **extra):
    return fn, files, extra


_N = {"n": dict(type=int, required=True)}
_BUDGET = {"budget": dict(type=int, default=None)}
_EDGE = {"edge": dict(default=None)}
_PRES = {"presentation": dict(default=None)}

COMMANDS = {
    "validate": _command(cmd_validate),
    "npc": _command(cmd_npc),
    "hyperplanes": _command(cmd_hyperplanes),
    "carrier": _command(cmd_carrier, **_EDGE),
    "hull": _command(cmd_hull, cells=dict(required=True)),
    "collapse": _command(cmd_collapse, verify=dict(action="store_true")),
    "separate": _command(cmd_separate, **_EDGE),
    "map-check": _command(cmd_map_check),
    "fiber": _command(cmd_fiber, files=2),
    "symmetric": _command(_relator_checks(check_symmetric)),
    "minimal": _command(_relator_checks(check_minimal)),
    "pieces": _command(cmd_pieces),
    "piece-bound": _command(cmd_piece_bound),
    "check-cn": _command(cmd_check_cn, **_N, **_BUDGET),
    "diagram validate": _command(cmd_diagram_validate, **_PRES),
    "diagram reduce": _command(cmd_diagram_reduce, **_PRES),
    "diagram features": _command(cmd_diagram_features, **_PRES),
    "diagram dichotomy": _command(cmd_diagram_dichotomy, **_PRES, **_BUDGET),
    "artin build": _command(cmd_artin_build),
    "artin profile": _command(cmd_artin_profile, radius=dict(type=int, default=None)),
    "artin certify": _command(cmd_artin_certify, **_N, radius=dict(type=int, default=None)),
}
GROUPS = {"diagram", "artin"}


def render(report: dict, fmt: str = "compact") -> str:
    if fmt == "pretty":
        return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    return json.dumps(report, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def _error(kind: str, message: str) -> dict:
    return {"status": "InputError", "error": {"kind": kind, "message": message}}


def run(argv: list[str]) -> tuple[int, dict, str]:
    """Execute one command; returns (exit code, report, format)."""
    fmt = "pretty" if "--format=pretty" in argv or _after(argv, "--format") == "pretty" else "compact"
    try:
        if not argv:
            raise UnknownCommand("no command given")
        name, rest = argv[0], argv[1:]
        if name in GROUPS:
            if not rest:
                raise UnknownCommand(f"{name} needs a subcommand")
            name, rest = f"{name} {rest[0]}", rest[1:]
        if name not in COMMANDS:
            raise UnknownCommand(f"unknown command {name!r}")
        fn, files, extra = COMMANDS[name]
        parser = _parser(name, files)
        for flag, kw in extra.items():
            parser.add_argument(f"--{flag}", **kw)
        args = parser.parse_args(rest)
        if args.jobs < 1:
            raise BadFlag("--jobs must be at least 1")
        fmt = args.format
        report = fn(args, Loader())
        if not isinstance(report.get("status"), str):
            report = {"status": "OK", **report}
        code = EXIT.get(report["status"], OK)
        if args.output:
            Path(args.output).write_text(render(report, fmt), encoding="utf-8")
        return code, report, fmt
    except UnknownCommand as exc:
        return INPUT_ERROR, _error("UnknownCommand", str(exc)), fmt
    except BadFlag as exc:
        return INPUT_ERROR, _error("BadFlag", str(exc).strip()), fmt
    except (InputFileNotFound, FileNotFoundError) as exc:
        return INPUT_ERROR, _error("FileNotFound", str(exc)), fmt
    except (ComplexError, A.LabeledGraphError) as exc:
        return INPUT_ERROR, _error(type(exc).__name__, str(exc)), fmt


def _after(argv: list[str], flag: str) -> str | None:
    for k, a in enumerate(argv[:-1]):
        if a == flag:
            return argv[k + 1]
    return None


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    code, report, fmt = run(argv)
    if "--output" in argv or "-o" in argv:
        if code == INPUT_ERROR:
            sys.stdout.write(render(report, fmt))
    else:
        sys.stdout.write(render(report, fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
