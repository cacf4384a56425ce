"""Dual curves, reduction pathologies and boundary features of diagrams."""

from __future__ import annotations

from dataclasses import dataclass, field
from ..complex_core.cells import format_oriented, square_boundary
from ..complex_core.collapse import CollapseCertificate, collapse_to_point
from ..presentation import CnVerdict, CubicalPresentation, check_cn
from .model import (
    OUTER,
    Diagram,
    PreconditionNotCertified,
    Step,
    inverse_path,
    is_graph_nullhomotopic,
    lift_cone,
    lift_path,
    lift_table,
    rotations_of,
)


@dataclass(frozen=True)
class DualCurve:
    edges: tuple[str, ...]
    squares: tuple[str, ...]
    closed: bool

    def as_dict(self) -> dict:
        return {"edges": list(self.edges), "squares": list(self.squares), "closed": self.closed}


@dataclass(frozen=True)
class Pathology:
    kind: str
    cells: tuple[str, ...]
    detail: dict = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        return {"kind": self.kind, "cells": list(self.cells), **self.detail}


# reduction conditions, in the order they are reported
CONDITIONS = ("monogon", "bigon", "nonogon", "cornsquare", "cancellable_pair", "absorbable_square",
              "inessential_cone", "combinable_pair")


def dual_curves(D: Diagram) -> list[DualCurve]:
    """Maximal chains of edges linked through opposite sides of squares."""
    links: dict[str, list[tuple[int, str, str]]] = {e: [] for e in D.edges}
    lid = 0
    for s, b in sorted(D.squares.items()):
        for k in (0, 1):
            a, c = b[k][0], b[k + 2][0]
            links[a].append((lid, s, c))
            if c != a:
                links[c].append((lid, s, a))
            lid += 1
    used: set[int] = set()
    seen: set[str] = set()
    curves = []
    ends = sorted(e for e in D.edges if len(links[e]) < 2)
    for start in ends + sorted(D.edges):
        if start in seen:
            continue
        edges, squares, cur = [start], [], start
        while True:
            nxt = next(((i, s, o) for i, s, o in links[cur] if i not in used), None)
            if nxt is None:
                break
            i, s, o = nxt
            used.add(i)
            squares.append(s)
            if o in edges:
                break
            edges.append(o)
            cur = o
        seen.update(edges)
        curves.append(DualCurve(tuple(edges), tuple(squares), len(squares) == len(edges)))
    return curves


def _curve_index(curves: list[DualCurve]) -> dict[str, int]:
    return {e: i for i, c in enumerate(curves) for e in c.edges}


def _follow(D: Diagram, sides, faces, start_face: str, pos: int) -> tuple[str, str, int] | None:
    """Leave ``start_face`` across side ``pos`` and follow the dual curve to its end.

    Returns (terminal edge, terminal face, position in that face), or None on a closed loop.
    """
    face, k = start_face, pos
    for _ in range(4 * len(D.squares) + 4):
        e = faces[face][k][0]
        other = [x for x in sides[e] if x != (face, k)]
        if not other:
            return None
        f2, j = other[0]
        if f2 not in D.squares:
            return e, f2, j
        face, k = f2, (j + 2) % 4
    return None


def _adjacent(n: int, i: int, j: int) -> bool:
    return n > 1 and ((i - j) % n == 1 or (j - i) % n == 1)


def _cornsquares(D: Diagram, target: str | None) -> list[Pathology]:
    """Squares whose corner curves end on consecutive sides of a cone-cell (or of the outer face)."""
    sides = D.sides()
    faces = D.face_sides()
    out = []
    for s, b in sorted(D.squares.items()):
        for k in range(4):
            a = _follow(D, sides, faces, s, k)
            c = _follow(D, sides, faces, s, (k + 1) % 4)
            if a is None or c is None:
                continue
            (ea, fa, ia), (ec, fc, ic) = a, c
            if fa != fc or fa in D.squares:
                continue
            if target == "cone" and fa == OUTER or target == "outer" and fa != OUTER:
                continue
            if not _adjacent(len(faces[fa]), ia, ic):
                continue
            if target == "outer" and (ea, ec) == (b[k][0], b[(k + 1) % 4][0]):
                continue  # an ordinary corner
            out.append(Pathology("cornsquare", (s, fa), {"corner": k, "ends": [ea, ec]}))
    return out


def square_alignments(D: Diagram, s1: str, s2: str):
    """Alignments (b1, b2, k) of two squares with b1[:k] == b2[:k] a maximal common path."""
    b1, b2 = D.squares[s1], D.squares[s2]
    for r1 in rotations_of(b1):
        for r2 in rotations_of(b2) + rotations_of(inverse_path(b2)):
            if r1[3] == r2[3]:
                continue
            k = 0
            while k < 4 and r1[k] == r2[k]:
                k += 1
            if 1 <= k < 4:
                yield r1, r2, k


def _cancellable(D: Diagram):
    adj: dict[str, set[str]] = {}
    for s, b in D.squares.items():
        for e, _ in b:
            adj.setdefault(e, set()).add(s)
    pairs = sorted({tuple(sorted((x, y))) for ss in adj.values() for x in ss for y in ss if x != y})
    for s1, s2 in pairs:
        for r1, r2, k in square_alignments(D, s1, s2):
            if all(D.label(r1[j]) == D.label(r2[j]) for j in range(k, 4)):
                yield (Pathology("cancellable_pair", (s1, s2), {"common": [format_oriented(*st) for st in r1[:k]]}),
                       (r1, r2, k))
                break


def _y_square_walks(T) -> dict[str, set[tuple[Step, ...]]]:
    """Base square -> closed relator 4-paths bounding a relator square over it."""
    if not hasattr(T, "square_walks"):
        out: dict[str, set[tuple[Step, ...]]] = {}
        for q in T.Y.squares:
            walk = tuple(square_boundary(T.Y[q]))
            out.setdefault(T.phi(q), set()).update(rotations_of(walk) + rotations_of(inverse_path(walk)))
        T.square_walks = out
    return T.square_walks


def _absorbable(D: Diagram, p: CubicalPresentation):
    """Squares sharing a path with a cone-cell whose relator contains the square on the right boundary."""
    for c, cc in sorted(D.cones.items()):
        T = lift_table(p, cc.relator)
        if T.Y.dimension < 2:
            continue
        walks = _y_square_walks(T)
        ys, yv = lift_cone(D, p, c)
        bnd = cc.boundary
        n = len(bnd)
        for s, sb in sorted(D.squares.items()):
            if not ({e for e, _ in sb} & {e for e, _ in bnd}):
                continue
            versions = rotations_of(sb) + rotations_of(inverse_path(sb))
            best = None
            for i in range(n):
                for v in versions:
                    k = 0
                    while k < 4 and k < n and bnd[(i + k) % n] == v[k]:
                        k += 1
                    if 1 <= k < 4 and (best is None or k > best[1]):
                        best = (i, k, v)
            if best is None:
                continue
            i, k, v = best
            rest = inverse_path(v[k:])
            run_lift = [ys[(i + j) % n] for j in range(k)]
            alt = lift_path(D, p, cc.relator, rest, yv[i])
            if alt is None:
                continue
            loop = tuple(run_lift) + inverse_path(alt[0])
            if loop in walks.get(D.square_labels[s], ()):
                yield Pathology("absorbable_square", (s, c), {"start": i, "length": k}), (c, s, i, k, v)


def _simply_connected(T) -> bool:
    if not hasattr(T, "collapsible"):
        T.collapsible = isinstance(collapse_to_point(T.Y), CollapseCertificate)
    return T.collapsible


def _inessential(D: Diagram, p: CubicalPresentation):
    outer = D.outer_edges()
    for c, cc in sorted(D.cones.items()):
        if any(e in outer for e, _ in cc.boundary):
            continue
        ys, _ = lift_cone(D, p, c)
        if is_graph_nullhomotopic(ys):
            yield Pathology("inessential_cone", (c,), {"filling": "tree"})
            continue
        T = lift_table(p, cc.relator)
        if T.Y.dimension >= 2 and _simply_connected(T):
            yield Pathology("inessential_cone", (c,), {"filling": "squares"})


def _combinable(D: Diagram, p: CubicalPresentation):
    lifts = {c: lift_cone(D, p, c) for c in D.cones}
    ids = sorted(D.cones)
    for a_i, a in enumerate(ids):
        for b in ids[a_i + 1:]:
            if D.cones[a].relator != D.cones[b].relator:
                continue
            va = {}
            for i, st in enumerate(D.cones[a].boundary):
                va.setdefault((D.tail(st), lifts[a][1][i]), i)
            for j, st in enumerate(D.cones[b].boundary):
                key = (D.tail(st), lifts[b][1][j])
                if key in va:
                    yield Pathology("combinable_pair", (a, b), {"vertex": key[0], "at": [va[key], j]}), (a, b, va[key], j)
                    break


def curve_pathologies(D: Diagram) -> list[Pathology]:
    curves = dual_curves(D)
    idx = _curve_index(curves)
    out = []
    crossings: dict[tuple[int, int], list[str]] = {}
    for s, b in sorted(D.squares.items()):
        c0, c1 = idx[b[0][0]], idx[b[1][0]]
        if c0 == c1:
            out.append(Pathology("monogon", (s,), {"curve": c0}))
            continue
        crossings.setdefault((min(c0, c1), max(c0, c1)), []).append(s)
    for (c0, c1), sqs in sorted(crossings.items()):
        if len(sqs) >= 2:
            out.append(Pathology("bigon", tuple(sqs), {"curves": [c0, c1]}))
    if D.kind == "disc":
        for i, c in enumerate(curves):
            if c.closed:
                out.append(Pathology("nonogon", c.squares, {"curve": i}))
    return out


def pathologies(D: Diagram, p: CubicalPresentation, first_only: bool = False) -> list[Pathology]:
    """Every violated reduction condition, grouped in the order of CONDITIONS."""
    out: list[Pathology] = []

    def take(items):
        for x in items:
            out.append(x[0] if isinstance(x, tuple) else x)
            if first_only:
                return True
        return False

    groups = [
        lambda: curve_pathologies(D),
        lambda: _cornsquares(D, "cone"),
        lambda: _cancellable(D),
        lambda: _absorbable(D, p),
        lambda: _inessential(D, p),
        lambda: _combinable(D, p),
    ]
    for g in groups:
        if take(g()) and first_only:
            break
    return out


def is_reduced(D: Diagram, p: CubicalPresentation) -> tuple[bool, Pathology | None]:
    found = pathologies(D, p, first_only=True)
    return (not found, found[0] if found else None)


# ---------------------------------------------------------------------------
# boundary features


@dataclass(frozen=True)
class Shell:
    cone: str
    outer_path: tuple[int, ...]  # positions on the cone boundary lying on the outer face
    pieces: tuple[tuple[int, int], ...]  # (start, length) in cone boundary positions

    @property
    def k(self) -> int:
        return len(self.pieces)

    def as_dict(self) -> dict:
        return {"cone": self.cone, "outer_positions": list(self.outer_path), "pieces": [list(x) for x in self.pieces],
                "k": self.k}


@dataclass(frozen=True)
class BoundaryFeatures:
    spurs: tuple[str, ...]
    corners: tuple[tuple[str, int], ...]  # (square, outer position)
    cornsquares: tuple[Pathology, ...]
    shells: tuple[Shell, ...]

    def as_dict(self) -> dict:
        return {"spurs": list(self.spurs), "corners": [{"square": s, "position": k} for s, k in self.corners],
                "cornsquares": [c.as_dict() for c in self.cornsquares], "shells": [s.as_dict() for s in self.shells]}


def _shell(D: Diagram, p: CubicalPresentation, c: str, max_pieces: int) -> Shell | None:
    cc = D.cones[c]
    outer = D.outer_edges()
    n = len(cc.boundary)
    on = [cc.boundary[k][0] in outer for k in range(n)]
    if not any(on):
        return None
    if all(on):
        return Shell(c, tuple(range(n)), ())
    # the outer positions must form one cyclic arc
    starts = [k for k in range(n) if on[k] and not on[k - 1]]
    if len(starts) != 1:
        return None
    k0 = starts[0]
    arc = []
    k = k0
    while on[k % n]:
        arc.append(k % n)
        k += 1
    inner_start, inner_len = k % n, n - len(arc)
    ys, _ = lift_cone(D, p, c)
    pieces, pos = [], 0
    while pos < inner_len:
        r = min(p.piece_reach(cc.relator, ys, inner_start + pos), inner_len - pos)
        if r == 0:
            return None
        pieces.append(((inner_start + pos) % n, r))
        pos += r
        if len(pieces) > max_pieces:
            return None
    return Shell(c, tuple(arc), tuple(pieces))


def boundary_features(D: Diagram, p: CubicalPresentation, max_pieces: int = 4) -> BoundaryFeatures:
    if D.kind != "disc":
        return BoundaryFeatures((), (), (), ())
    spurs = tuple(sorted(v for v in D.vertices if D.degree(v) == 1))
    corners = []
    n = len(D.outer)
    for k in range(n):
        a, b = D.outer[k][0], D.outer[(k + 1) % n][0]
        for s, sb in sorted(D.squares.items()):
            es = [e for e, _ in sb]
            for j in range(4):
                if {es[j], es[(j + 1) % 4]} == {a, b} and a != b:
                    corners.append((s, k))
                    break
            else:
                continue
            break
    shells = tuple(sh for c in sorted(D.cones) if (sh := _shell(D, p, c, max_pieces)) is not None)
    return BoundaryFeatures(spurs, tuple(corners), tuple(_cornsquares(D, "outer")), shells)


def is_single_cell(D: Diagram) -> bool:
    faces = D.faces()
    if not faces:
        return len(D.edges) <= 1
    if len(faces) != 1:
        return False
    (b,) = faces.values()
    return {e for e, _ in b} == set(D.edges)


@dataclass(frozen=True)
class DichotomyVerdict:
    status: str  # PASS | FAIL
    single_cell: bool
    shells: int
    corners: int
    spurs: int
    reduced: bool
    features: BoundaryFeatures

    @property
    def count(self) -> int:
        return self.shells + self.corners + self.spurs

    def as_dict(self) -> dict:
        return {"status": self.status, "single_cell": self.single_cell, "shells": self.shells,
                "corners": self.corners, "spurs": self.spurs, "total": self.count, "reduced": self.reduced,
                "features": self.features.as_dict()}


def check_dichotomy(D: Diagram, p: CubicalPresentation, certificate: CnVerdict | None = None,
                    budget: int | None = None) -> DichotomyVerdict:
    """Single cell, or at least two shells, corners and spurs in total.

    Needs a C(9) certificate for the presentation; one is computed unless supplied.
    """
    cert = certificate if certificate is not None else check_cn(p, 9, budget)
    if cert.status != "Certified" or cert.n < 9:
        raise PreconditionNotCertified(f"presentation is not certified C(9): {cert.status}")
    feats = boundary_features(D, p)
    single = is_single_cell(D)
    ok = single or len(feats.shells) + len(feats.corners) + len(feats.spurs) >= 2
    return DichotomyVerdict("PASS" if ok else "FAIL", single, len(feats.shells), len(feats.corners),
                            len(feats.spurs), is_reduced(D, p)[0], feats)
