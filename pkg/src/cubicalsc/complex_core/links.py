"""Vertex links and the flag (non-positive curvature) condition."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .cells import CubeComplex, UnknownVertex

Node = tuple[str, int]  # (edge id, end index)


@dataclass(frozen=True)
class Arc:
    square: str
    corner: int
    nodes: tuple[Node, Node]


@dataclass(frozen=True)
class Triangle:
    cube: str
    corner: int
    nodes: tuple[Node, Node, Node]


@dataclass(frozen=True)
class VertexLink:
    vertex: str
    nodes: tuple[Node, ...]
    arcs: tuple[Arc, ...]
    triangles: tuple[Triangle, ...]


def corner_nodes(X: CubeComplex, cid: str, mask: int) -> tuple[Node, ...]:
    """Edge-ends at corner ``mask`` of cell ``cid``, one per direction."""
    c = X[cid]
    return tuple(c.edge_at(mask, i) for i in range(c.dim))


def link(X: CubeComplex, v: str) -> VertexLink:
    if v not in X or X[v].dim != 0:
        raise UnknownVertex(f"unknown vertex {v!r}", v)
    nodes, arcs, tris = [], [], []
    for cid in sorted(X.incident_cells[v]):
        c = X[cid]
        for m, w in enumerate(c.corners):
            if w != v:
                continue
            if c.dim == 1:
                nodes.append((cid, m))
            elif c.dim == 2:
                arcs.append(Arc(cid, m, corner_nodes(X, cid, m)))
            elif c.dim == 3:
                tris.append(Triangle(cid, m, corner_nodes(X, cid, m)))
    return VertexLink(v, tuple(sorted(nodes)), tuple(arcs), tuple(tris))


@dataclass(frozen=True)
class NPCVerdict:
    npc: bool
    vertex: str | None = None
    problem: str | None = None
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.npc

    def as_dict(self) -> dict:
        if self.npc:
            return {"status": "NPC"}
        return {"status": "NotNPC", "vertex": self.vertex, "problem": self.problem,
                "witness": [list(w) if isinstance(w, tuple) else w for w in self.witness]}


def check_link(L: VertexLink) -> NPCVerdict:
    v = L.vertex
    pairs: dict[frozenset, Arc] = {}
    adj: dict[Node, set[Node]] = {n: set() for n in L.nodes}
    for a in L.arcs:
        x, y = a.nodes
        if x == y:
            return NPCVerdict(False, v, "loop", (a.square, a.corner))
        key = frozenset(a.nodes)
        if key in pairs:
            other = pairs[key]
            return NPCVerdict(False, v, "multi-arc", ((other.square, other.corner), (a.square, a.corner)))
        pairs[key] = a
        adj[x].add(y)
        adj[y].add(x)
    filled: dict[frozenset, Triangle] = {}
    for t in L.triangles:
        key = frozenset(t.nodes)
        if len(key) < 3:
            return NPCVerdict(False, v, "degenerate-triangle", (t.cube, t.corner))
        if key in filled:
            other = filled[key]
            return NPCVerdict(False, v, "multi-triangle", ((other.cube, other.corner), (t.cube, t.corner)))
        filled[key] = t
    order = {n: i for i, n in enumerate(L.nodes)}
    for x in L.nodes:
        for y in sorted(adj[x], key=order.get):
            if order[y] <= order[x]:
                continue
            for z in sorted(adj[x] & adj[y], key=order.get):
                if order[z] <= order[y]:
                    continue
                if frozenset((x, y, z)) not in filled:
                    return NPCVerdict(False, v, "unfilled-triangle", (x, y, z))
                for w in sorted(adj[x] & adj[y] & adj[z], key=order.get):
                    if order[w] > order[z]:
                        return NPCVerdict(False, v, "4-clique", (x, y, z, w))
    return NPCVerdict(True)


def check_npc(X: CubeComplex) -> NPCVerdict:
    """Flag condition at every vertex, scanning vertices in id order."""
    for v in X.vertices:
        verdict = check_link(link(X, v))
        if not verdict:
            return verdict
    return NPCVerdict(True)


def brute_force_flag(X: CubeComplex) -> bool:
    """Independent flag test: enumerate every node subset of size 2..4 per link."""
    for v in X.vertices:
        L = link(X, v)
        arc_pairs = [tuple(sorted(a.nodes)) for a in L.arcs]
        if any(x == y for x, y in arc_pairs) or len(set(arc_pairs)) != len(arc_pairs):
            return False
        tri_sets = [tuple(sorted(t.nodes)) for t in L.triangles]
        if any(len(set(t)) < 3 for t in tri_sets) or len(set(tri_sets)) != len(tri_sets):
            return False
        edge_set = set(arc_pairs)
        for size in (3, 4):
            for combo in combinations(L.nodes, size):
                if all(p in edge_set for p in combinations(combo, 2)):
                    if size == 4 or combo not in set(tri_sets):
                        return False
    return True
