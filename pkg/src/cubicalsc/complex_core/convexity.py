"""Combinatorial convexity and convex hulls.

A corner of a ``k``-cube is the set of its ``k`` edges at one corner vertex.
A face-closed connected subcomplex is convex when it contains every cube
having a corner inside it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable

from .cells import CubeComplex, NotConnected, Subcomplex


def corner_edges(X: CubeComplex, cid: str, mask: int) -> tuple[str, ...]:
    c = X[cid]
    return tuple(c.edge_at(mask, i)[0] for i in range(c.dim))


@dataclass(frozen=True)
class ConvexityVerdict:
    convex: bool
    cube: str | None = None
    corner: int | None = None

    def __bool__(self) -> bool:
        return self.convex

    def as_dict(self) -> dict:
        if self.convex:
            return {"status": "Convex"}
        return {"status": "NotConvex", "cube": self.cube, "corner": self.corner}


def _violation(X: CubeComplex, cells: frozenset[str]) -> tuple[str, int] | None:
    for k in (2, 3):
        for cid in X.of_dim(k):
            if cid in cells:
                continue
            c = X[cid]
            for m in range(1 << k):
                if c.corners[m] in cells and all(e in cells for e in corner_edges(X, cid, m)):
                    return cid, m
    return None


def is_convex(X: CubeComplex, S: Subcomplex) -> ConvexityVerdict:
    cells = X.closure(S.cells)
    if cells != S.cells:
        raise ValueError("subcomplex is not face-closed")
    if len(X.components(cells)) > 1:
        raise NotConnected("subcomplex is not connected")
    hit = _violation(X, cells)
    if hit is None:
        return ConvexityVerdict(True)
    return ConvexityVerdict(False, *hit)


def _connecting_path(X: CubeComplex, cells: set[str]) -> list[str]:
    """Shortest edge path (as edge ids) from the first component to any other."""
    comps = X.components(cells)
    first = comps[0]
    others = set().union(*comps[1:])
    adj = X.adjacency()
    start = sorted(v for v in first if X[v].dim == 0)
    prev: dict[str, tuple[str, str] | None] = {v: None for v in start}
    q = deque(start)
    while q:
        v = q.popleft()
        if v in others:
            path = []
            while prev[v] is not None:
                e, u = prev[v]
                path.append(e)
                v = u
            return path[::-1]
        for e, w in adj[v]:
            if w not in prev:
                prev[w] = (e, v)
                q.append(w)
    raise NotConnected("subcomplex components lie in different components of the complex")


def convex_hull(X: CubeComplex, S: Subcomplex | Iterable[str]) -> Subcomplex:
    """Smallest convex subcomplex containing ``S``; connecting paths are recorded."""
    start = S.cells if isinstance(S, Subcomplex) else frozenset(S)
    cells = set(X.closure(start))
    added_paths = []
    while len(X.components(cells)) > 1:
        path = _connecting_path(X, cells)
        added_paths.append(path)
        cells |= X.closure(path)
    changed = True
    while changed:
        changed = False
        for k in (2, 3):
            for cid in X.of_dim(k):
                if cid in cells:
                    continue
                c = X[cid]
                for m in range(1 << k):
                    if c.corners[m] in cells and all(e in cells for e in corner_edges(X, cid, m)):
                        cells |= X.closure([cid])
                        changed = True
                        break
    return Subcomplex(X, frozenset(cells), True, {"connecting_paths": added_paths})
