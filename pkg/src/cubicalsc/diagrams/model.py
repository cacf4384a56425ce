"""Disc and spherical diagrams over a cubical presentation.

A diagram is a list of polygons (squares and cone-cells) glued along edges.
Planarity is checked on the closed surface obtained by adding the outer
face: every edge must lie on exactly two face sides, every vertex link must
be one cycle, and the Euler characteristic must be that of a sphere.  The
rotation system is read off the vertex links.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field, replace
from typing import Mapping, NamedTuple, Sequence

from ..complex_core.cells import ComplexError, format_oriented, parse_oriented, square_boundary
from ..presentation import CubicalPresentation

Step = tuple[str, int]
HalfEdge = tuple[str, int]  # (edge, 0 at tail / 1 at head)
OUTER = "@outer"


class DiagramError(ComplexError):
    kind = "DiagramError"


class MalformedDiagram(DiagramError):
    kind = "MalformedDiagram"


class NonPlanar(DiagramError):
    kind = "NonPlanar"


class EulerMismatch(DiagramError):
    kind = "EulerMismatch"


class ConeBoundaryNotClosed(DiagramError):
    kind = "ConeBoundaryNotClosed"


class LabelMismatch(DiagramError):
    kind = "LabelMismatch"


class ConeCellNotFound(DiagramError):
    kind = "ConeCellNotFound"


class FillingRequired(DiagramError):
    kind = "FillingRequired"


class PreconditionNotCertified(DiagramError):
    kind = "PreconditionNotCertified"


class Complexity(NamedTuple):
    cone_cells: int
    squares: int


@dataclass(frozen=True)
class ConeCell:
    boundary: tuple[Step, ...]
    relator: int
    basepoint: str


def inverse_path(path: Sequence[Step]) -> tuple[Step, ...]:
    return tuple((e, -s) for e, s in reversed(path))


def rotations_of(path: Sequence[Step]) -> list[tuple[Step, ...]]:
    n = len(path)
    return [tuple(path[k:]) + tuple(path[:k]) for k in range(n)]


@dataclass(frozen=True, eq=False)
class Diagram:
    kind: str  # "disc" | "sphere"
    vertices: tuple[str, ...]
    edges: Mapping[str, tuple[str, str]]
    squares: Mapping[str, tuple[Step, ...]]
    cones: Mapping[str, ConeCell]
    vertex_labels: Mapping[str, str]
    edge_labels: Mapping[str, Step]
    square_labels: Mapping[str, str]
    outer: tuple[Step, ...] = ()
    rotation: Mapping[str, tuple[HalfEdge, ...]] = field(default_factory=dict)

    @property
    def complexity(self) -> Complexity:
        return Complexity(len(self.cones), len(self.squares))

    def faces(self) -> dict[str, tuple[Step, ...]]:
        out = dict(self.squares)
        out.update({c: cc.boundary for c, cc in self.cones.items()})
        return out

    def face_sides(self) -> dict[str, tuple[Step, ...]]:
        """All polygons of the closed surface, outer face included for discs."""
        out = self.faces()
        if self.kind == "disc" and self.edges:
            out[OUTER] = self.outer
        return out

    def tail(self, st: Step) -> str:
        u, v = self.edges[st[0]]
        return u if st[1] > 0 else v

    def head(self, st: Step) -> str:
        u, v = self.edges[st[0]]
        return v if st[1] > 0 else u

    def label(self, st: Step) -> Step:
        t, s = self.edge_labels[st[0]]
        return t, s * st[1]

    def boundary_word(self) -> tuple[Step, ...]:
        return tuple(self.label(st) for st in self.outer)

    def sides(self) -> dict[str, list[tuple[str, int]]]:
        """Edge -> list of (face, position) occurrences, outer face included."""
        out: dict[str, list[tuple[str, int]]] = {e: [] for e in self.edges}
        for f, b in sorted(self.face_sides().items()):
            for k, (e, _) in enumerate(b):
                out[e].append((f, k))
        return out

    def degree(self, v: str) -> int:
        return sum((u == v) + (w == v) for u, w in self.edges.values())

    def euler(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.squares) + len(self.cones)

    def outer_edges(self) -> set[str]:
        return {e for e, _ in self.outer}

    def as_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "vertices": [{"id": v, "label": self.vertex_labels[v]} for v in self.vertices],
            "edges": [{"id": e, "ends": list(self.edges[e]), "label": format_oriented(*self.edge_labels[e])}
                      for e in sorted(self.edges)],
            "squares": [{"id": s, "boundary": [format_oriented(*st) for st in b], "label": self.square_labels[s]}
                        for s, b in sorted(self.squares.items())],
            "cone_cells": [{"id": c, "boundary": [format_oriented(*st) for st in cc.boundary],
                            "relator": cc.relator, "basepoint": cc.basepoint}
                           for c, cc in sorted(self.cones.items())],
            "rotations": {v: [format_oriented(e, 1 if end == 0 else -1) for e, end in rot]
                          for v, rot in sorted(self.rotation.items())},
        }
        if self.kind == "disc":
            d["outer"] = [format_oriented(*st) for st in self.outer]
        return d


# ---------------------------------------------------------------------------
# relator lifting


class _LiftTable:
    def __init__(self, p: CubicalPresentation, i: int):
        phi = p.relators[i]
        self.Y = phi.domain
        self.phi = phi
        self.step: dict[tuple[str, str, int], tuple[str, int, str]] = {}
        for e in self.Y.edges:
            t, s = phi.edge_image(e)
            u, w = self.Y.ends(e)
            self.step[(u, t, s)] = (e, 1, w)
            self.step[(w, t, -s)] = (e, -1, u)


_TABLES: "weakref.WeakKeyDictionary[CubicalPresentation, dict[int, _LiftTable]]" = weakref.WeakKeyDictionary()


def lift_table(p: CubicalPresentation, i: int) -> _LiftTable:
    per = _TABLES.setdefault(p, {})
    if i not in per:
        per[i] = _LiftTable(p, i)
    return per[i]


def lift_path(D: Diagram, p: CubicalPresentation, relator: int, path: Sequence[Step],
              y0: str) -> tuple[list[Step], list[str]] | None:
    """Lift a diagram path into relator ``relator`` from ``y0``; None if it leaves the relator."""
    T = lift_table(p, relator)
    ys, yv = [], [y0]
    y = y0
    for st in path:
        t, s = D.label(st)
        nxt = T.step.get((y, t, s))
        if nxt is None:
            return None
        e, sy, y = nxt
        ys.append((e, sy))
        yv.append(y)
    return ys, yv


def lift_cone(D: Diagram, p: CubicalPresentation, cid: str) -> tuple[list[Step], list[str]]:
    """Relator steps and relator vertices (tails) along the cone-cell boundary from its basepoint."""
    cc = D.cones[cid]
    got = lift_path(D, p, cc.relator, cc.boundary, cc.basepoint)
    if got is None:
        raise ConeBoundaryNotClosed(f"cone-cell {cid} boundary leaves relator {cc.relator}", cid)
    ys, yv = got
    if yv[-1] != cc.basepoint:
        raise ConeBoundaryNotClosed(f"cone-cell {cid} boundary is open in relator {cc.relator}", cid)
    return ys, yv[:-1]


def is_graph_nullhomotopic(ysteps: Sequence[Step]) -> bool:
    """A closed path in a graph is nullhomotopic iff it freely reduces to nothing."""
    stack: list[Step] = []
    for e, s in ysteps:
        if stack and stack[-1] == (e, -s):
            stack.pop()
        else:
            stack.append((e, s))
    return not stack


# ---------------------------------------------------------------------------
# validation


def _closed(D: Diagram, path: Sequence[Step]) -> bool:
    return all(D.head(path[k]) == D.tail(path[(k + 1) % len(path)]) for k in range(len(path)))


def _square_word_ok(word: tuple[Step, ...], base_word: tuple[Step, ...]) -> bool:
    return word in rotations_of(base_word) or word in rotations_of(inverse_path(base_word))


def derive_rotation(D: Diagram) -> dict[str, tuple[HalfEdge, ...]]:
    """Vertex -> cyclic order of half-edges; raises NonPlanar if some link is not a single cycle."""
    sides = D.face_sides()
    nbrs: dict[HalfEdge, list[HalfEdge]] = {}
    for e in D.edges:
        nbrs[(e, 0)] = []
        nbrs[(e, 1)] = []
    for f, b in sides.items():
        n = len(b)
        for k in range(n):
            a, c = b[k], b[(k + 1) % n]
            h_in = (a[0], 1 if a[1] > 0 else 0)
            h_out = (c[0], 0 if c[1] > 0 else 1)
            nbrs[h_in].append(h_out)
            nbrs[h_out].append(h_in)
    at: dict[str, list[HalfEdge]] = {v: [] for v in D.vertices}
    for (e, end) in nbrs:
        at[D.edges[e][end]].append((e, end))
    rot = {}
    for v, hs in at.items():
        if not hs:
            if len(D.vertices) > 1:
                raise NonPlanar(f"isolated vertex {v}", v)
            rot[v] = ()
            continue
        if any(len(nbrs[h]) != 2 for h in hs):
            raise NonPlanar(f"link of {v} is not a cycle", v)
        start = min(hs)
        order = [start]
        prev, cur = None, start
        nxt = min(nbrs[start])
        while True:
            prev, cur = cur, nxt
            if cur == start:
                break
            order.append(cur)
            a, b = nbrs[cur]
            nxt = b if a == prev and b != prev else a
            if len(order) > len(hs):
                break
        if len(order) != len(hs):
            raise NonPlanar(f"link of {v} is not a single cycle", v)
        rot[v] = tuple(order)
    return rot


def check_diagram(D: Diagram, p: CubicalPresentation) -> Diagram:
    """Run every diagram invariant; returns ``D`` with its rotation system filled in."""
    X = p.base
    if D.kind not in ("disc", "sphere"):
        raise MalformedDiagram(f"unknown diagram kind {D.kind!r}")
    ids = list(D.vertices) + list(D.edges) + list(D.squares) + list(D.cones)
    if len(set(ids)) != len(ids):
        raise MalformedDiagram("repeated cell id")
    verts = set(D.vertices)
    for e, (u, v) in D.edges.items():
        if u not in verts or v not in verts:
            raise MalformedDiagram(f"edge {e} has an unknown end", e)
    for f, b in D.faces().items():
        for e, s in b:
            if e not in D.edges or s not in (1, -1):
                raise MalformedDiagram(f"face {f} references unknown edge {e}", f)
    for e, _ in D.outer:
        if e not in D.edges:
            raise MalformedDiagram(f"outer boundary references unknown edge {e}", e)
    # labels
    for v in D.vertices:
        if D.vertex_labels.get(v) not in X.vertices:
            raise LabelMismatch(f"vertex {v} has no base vertex label", v)
    for e, (u, v) in D.edges.items():
        lab = D.edge_labels.get(e)
        if lab is None or lab[0] not in X.edges:
            raise LabelMismatch(f"edge {e} has no base edge label", e)
        bu, bv = X.ends(lab[0])
        want = (bu, bv) if lab[1] > 0 else (bv, bu)
        if (D.vertex_labels[u], D.vertex_labels[v]) != want:
            raise LabelMismatch(f"edge {e} ends do not match its label {format_oriented(*lab)}", e)
    for s, b in D.squares.items():
        if len(b) != 4 or not _closed(D, b):
            raise MalformedDiagram(f"square {s} boundary is not a closed 4-path", s)
        sq = D.square_labels.get(s)
        if sq not in X or X[sq].dim != 2:
            raise LabelMismatch(f"square {s} has no base square label", s)
        if not _square_word_ok(tuple(D.label(st) for st in b), tuple(square_boundary(X[sq]))):
            raise LabelMismatch(f"square {s} boundary does not read {sq}", s)
    for c, cc in D.cones.items():
        if not 0 <= cc.relator < len(p.relators):
            raise MalformedDiagram(f"cone-cell {c} names unknown relator {cc.relator}", c)
        if not cc.boundary or not _closed(D, cc.boundary):
            raise ConeBoundaryNotClosed(f"cone-cell {c} boundary is not a closed path in the diagram", c)
        if cc.basepoint not in p.relators[cc.relator].domain.vertices:
            raise MalformedDiagram(f"cone-cell {c} basepoint {cc.basepoint} is not a relator vertex", c)
        lift_cone(D, p, c)
    # topology
    expected = 1 if D.kind == "disc" else 2
    if D.euler() != expected:
        raise EulerMismatch(f"Euler characteristic {D.euler()}, expected {expected}")
    if D.kind == "sphere" and D.outer:
        raise MalformedDiagram("a sphere has no outer boundary")
    if not D.edges:
        if D.kind != "disc" or len(D.vertices) != 1 or D.faces():
            raise NonPlanar("edgeless diagram must be a single vertex")
        return replace(D, rotation={D.vertices[0]: ()})
    if D.kind == "disc" and (not D.outer or not _closed(D, D.outer)):
        raise MalformedDiagram("outer boundary is not a closed path")
    for e, occ in D.sides().items():
        if len(occ) != 2:
            raise NonPlanar(f"edge {e} lies on {len(occ)} face sides, expected 2", e)
    parent = {v: v for v in D.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in D.edges.values():
        parent[find(u)] = find(v)
    if len({find(v) for v in D.vertices}) != 1:
        raise NonPlanar("diagram is not connected")
    return replace(D, rotation=derive_rotation(D))


def _same_cycle(a: Sequence, b: Sequence) -> bool:
    if len(a) != len(b):
        return False
    return tuple(a) in rotations_of(tuple(b)) or tuple(a) in rotations_of(tuple(reversed(b)))


def validate_diagram(raw: Mapping, p: CubicalPresentation) -> Diagram:
    """Diagram from its file description, with every invariant checked."""
    if not isinstance(raw, Mapping):
        raise MalformedDiagram("diagram description must be an object")
    try:
        kind = raw.get("kind", "disc")
        vraw = raw.get("vertices", [])
        vertices, vlabels = [], {}
        for v in vraw:
            if isinstance(v, Mapping):
                vertices.append(v["id"])
                if "label" in v:
                    vlabels[v["id"]] = v["label"]
            else:
                vertices.append(v)
        vlabels.update(raw.get("vertex_labels", {}) or {})
        edges, elabels = {}, {}
        for e in raw.get("edges", []):
            edges[e["id"]] = tuple(e["ends"])
            elabels[e["id"]] = parse_oriented(e["label"])
        squares, slabels = {}, {}
        for s in raw.get("squares", []):
            squares[s["id"]] = tuple(parse_oriented(x) for x in s["boundary"])
            slabels[s["id"]] = s["label"]
        cones = {}
        for k, c in enumerate(raw.get("cone_cells", [])):
            cid = c.get("id", f"C{k}")
            cones[cid] = ConeCell(tuple(parse_oriented(x) for x in c["boundary"]), int(c["relator"]),
                                  c["basepoint"])
        outer = tuple(parse_oriented(x) for x in raw.get("outer", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedDiagram(f"malformed diagram: {exc}") from None
    X = p.base
    for v in vertices:
        if v not in vlabels and len(X.vertices) == 1:
            vlabels[v] = X.vertices[0]
    D = Diagram(kind, tuple(vertices), edges, squares, cones, vlabels, elabels, slabels, outer)
    D = check_diagram(D, p)
    given = raw.get("rotations")
    if given:
        for v, order in given.items():
            hs = []
            for ref in order:
                e, s = parse_oriented(ref)
                hs.append((e, 0 if s > 0 else 1))
            if v not in D.rotation or not _same_cycle(hs, D.rotation[v]):
                raise NonPlanar(f"rotation at {v} disagrees with the face structure", v)
    return D
