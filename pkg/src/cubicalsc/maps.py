"""Fiber products of maps over a common base, Stallings index, and the symmetric/minimal checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .complex_core.cells import ComplexError, Cube, CubeComplex, FaceRef, Pattern, Subcomplex, face_corners
from .morphisms import (
    BoundaryMismatch,
    CombinatorialMap,
    IsometryVerdict,
    MissingAssignment,
    check_local_isometry,
    identity_map,
    inclusion,
    validate_map,
)

if TYPE_CHECKING:
    from .presentation import CubicalPresentation

__all__ = [
    "BoundaryMismatch", "CombinatorialMap", "FiberComponent", "FiberProduct", "IsometryVerdict",
    "MissingAssignment", "NotAGraph", "NotImmersed", "RelatorNotGraph", "check_local_isometry",
    "check_minimal", "check_symmetric", "fiber_product", "finite_index", "identity_map", "inclusion",
    "validate_map",
]

INF = math.inf

NORMALITY_NOTE = ("iso-iso components identify Stab(Y) with pi1(Y) under the standing convention "
                  "that pi1(Y) is normal in the stabiliser")
PARTIAL_NOTE = "superconvexity is not checked; only the fiber-product clause is verified"


class NotAGraph(ComplexError):
    kind = "NotAGraph"


class NotImmersed(ComplexError):
    kind = "NotImmersed"


class RelatorNotGraph(ComplexError):
    kind = "RelatorNotGraph"


def pair_name(a: str, b: str) -> str:
    return f"<{a}|{b}>"


@dataclass(frozen=True, eq=False)
class FiberComponent:
    cells: Subcomplex
    complex: CubeComplex
    left: CombinatorialMap
    right: CombinatorialMap
    iso_left: bool
    iso_right: bool
    index_in_left: float | int | None
    diagonal: bool = False

    @property
    def edge_count(self) -> int:
        return len(self.complex.edges)

    def has_cycle(self) -> bool:
        X = self.complex
        return len(X.edges) - len(X.vertices) + 1 > 0 if X.dimension <= 1 else True

    def as_dict(self) -> dict:
        idx = self.index_in_left
        return {"cells": sorted(self.cells.cells), "iso_left": self.iso_left, "iso_right": self.iso_right,
                "index_in_left": "inf" if idx == INF else idx, "diagonal": self.diagonal,
                "vertices": len(self.complex.vertices), "edges": len(self.complex.edges)}


@dataclass(frozen=True, eq=False)
class FiberProduct:
    total: CubeComplex
    proj_left: CombinatorialMap
    proj_right: CombinatorialMap
    components: tuple[FiberComponent, ...]
    left_of: dict = field(default_factory=dict)
    right_of: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        counts = [len(self.total.of_dim(k)) for k in range(4)]
        return {"status": "OK", "cells_by_dimension": counts,
                "components": [c.as_dict() for c in self.components]}


def _pattern_of(masks: list[int]) -> Pattern:
    dirs = 0
    for m in masks:
        dirs |= m ^ masks[0]
    return dirs, min(masks) & ~dirs


def fiber_product(f: CombinatorialMap, g: CombinatorialMap, same_map: bool | None = None) -> FiberProduct:
    """Cells are pairs over a common image cell; pair ``<a|b>`` uses ``a``'s coordinates."""
    over: dict[str, list[str]] = {}
    for b, (t, _) in g.cells.items():
        over.setdefault(t, []).append(b)
    A, B = f.domain, g.domain
    cells: list[Cube] = []
    left: dict[str, FaceRef] = {}
    right: dict[str, FaceRef] = {}
    left_of, right_of = {}, {}
    for a, (t, rho_a) in f.cells.items():
        ca = A[a]
        for b in sorted(over.get(t, ())):
            cb = B[b]
            inv_b = {x: m for m, x in enumerate(g.cells[b][1])}
            phi = tuple(inv_b[rho_a[m]] for m in range(1 << ca.dim))
            name = pair_name(a, b)
            corners = tuple(pair_name(ca.corners[m], cb.corners[phi[m]]) for m in range(1 << ca.dim))
            faces: dict[Pattern, FaceRef] = {}
            for pat, (da, own_da) in ca.faces.items():
                bpat = _pattern_of([phi[m] for m in face_corners(pat)])
                db = cb.faces[bpat][0]
                faces[pat] = (pair_name(da, db), own_da)
            cells.append(Cube(name, ca.dim, corners, faces))
            left[name] = (a, tuple(range(1 << ca.dim)))
            right[name] = (b, phi)
            left_of[name], right_of[name] = a, b
    total = CubeComplex(cells)
    pl = CombinatorialMap(total, A, left)
    pr = CombinatorialMap(total, B, right)
    if same_map is None:
        same_map = f is g or (f.codomain is g.codomain and dict(f.cells) == dict(g.cells)
                              and set(A.cells) == set(B.cells))
    comps = []
    for comp in total.components():
        sub = total.subcomplex(comp)
        lmap, rmap = pl.restrict(sub), pr.restrict(sub)
        iso_l = lmap.is_isomorphism()
        iso_r = rmap.is_isomorphism()
        idx = None
        if sub.dimension <= 1 and A.dimension <= 1:
            try:
                idx = finite_index(lmap)
            except NotImmersed:
                idx = None
        diag = same_map and all(left_of[c] == right_of[c] for c in comp)
        comps.append(FiberComponent(Subcomplex(total, comp, True), sub, lmap, rmap, iso_l, iso_r, idx, diag))
    return FiberProduct(total, pl, pr, tuple(comps), left_of, right_of)


# ---------------------------------------------------------------------------
# Stallings index for graph immersions


def _core(X: CubeComplex) -> frozenset[str]:
    """Cells surviving iterated removal of valence <= 1 vertices (empty for a tree)."""
    alive_v = set(X.vertices)
    alive_e = set(X.edges)
    val = {v: 0 for v in X.vertices}
    for e in X.edges:
        u, w = X.ends(e)
        val[u] += 1
        val[w] += 1
    stack = [v for v in X.vertices if val[v] <= 1]
    inc: dict[str, list[str]] = {v: [] for v in X.vertices}
    for e in X.edges:
        for v in set(X.ends(e)):
            inc[v].append(e)
    while stack:
        v = stack.pop()
        if v not in alive_v or val[v] > 1:
            continue
        alive_v.discard(v)
        for e in inc[v]:
            if e in alive_e:
                alive_e.discard(e)
                u, w = X.ends(e)
                for x in (u, w):
                    if x != v and x in alive_v:
                        val[x] -= 1
                        if val[x] <= 1:
                            stack.append(x)
    return frozenset(alive_v | alive_e)


def _is_immersion(f: CombinatorialMap) -> str | None:
    seen: dict[tuple[str, str, int], str] = {}
    for e in f.domain.edges:
        t, own = f.image(e)
        for end in (0, 1):
            v = f.domain[e].corners[end]
            key = (v, t, own[end])
            if key in seen and seen[key] != f"{e}/{end}":
                return v
            seen[key] = f"{e}/{end}"
    return None


def finite_index(K: CombinatorialMap) -> int | float:
    """Index of the image subgroup for a graph immersion, up to conjugacy (math.inf if infinite)."""
    if K.domain.dimension > 1 or K.codomain.dimension > 1:
        raise NotAGraph("finite_index needs graphs")
    bad = _is_immersion(K)
    if bad is not None:
        raise NotImmersed(f"two edges fold together at {bad}", bad)
    core_k = _core(K.domain)
    core_y = _core(K.codomain)
    if not core_k:
        return 1 if not core_y else INF
    if len(K.domain.components(core_k)) != 1:
        return INF
    # covering test: every core vertex of K sees every core edge-end of its image
    val_k: dict[str, int] = {}
    for e in K.domain.edges:
        if e in core_k:
            for v in K.domain.ends(e):
                val_k[v] = val_k.get(v, 0) + 1
    val_y: dict[str, int] = {}
    for e in K.codomain.edges:
        if e in core_y:
            for v in K.codomain.ends(e):
                val_y[v] = val_y.get(v, 0) + 1
    for v in core_k:
        if K.domain[v].dim == 0 and val_k.get(v, 0) != val_y.get(K(v), 0):
            return INF
    nv_y = sum(1 for c in core_y if K.codomain[c].dim == 0)
    nv_k = sum(1 for c in core_k if K.domain[c].dim == 0)
    if nv_k % nv_y:
        return INF
    return nv_k // nv_y


# ---------------------------------------------------------------------------
# hypotheses on presentations


@dataclass(frozen=True)
class RelatorVerdict:
    relator: int
    holds: bool
    witness: tuple[FiberComponent, ...] = ()
    note: str = ""

    def as_dict(self) -> dict:
        return {"relator": self.relator, "holds": self.holds,
                "witness": [w.as_dict() for w in self.witness], "note": self.note}


def _graph_relators(p: "CubicalPresentation") -> None:
    for i, phi in enumerate(p.relators):
        if phi.domain.dimension > 1:
            raise RelatorNotGraph(f"relator {i} has dimension {phi.domain.dimension}", str(i))


def check_symmetric(p: "CubicalPresentation") -> list[RelatorVerdict]:
    """Per relator: every self-fiber-product component is iso both ways or of infinite index.

    Verdicts are PARTIAL: superconvexity is not part of the check.
    """
    _graph_relators(p)
    out = []
    for i, phi in enumerate(p.relators):
        fp = fiber_product(phi, phi)
        bad = tuple(c for c in fp.components
                    if not (c.iso_left and c.iso_right) and c.index_in_left != INF)
        out.append(RelatorVerdict(i, not bad, bad, "PARTIAL: " + PARTIAL_NOTE))
    return out


def check_minimal(p: "CubicalPresentation") -> list[RelatorVerdict]:
    """Per relator: no non-diagonal self-fiber-product component is iso both ways."""
    _graph_relators(p)
    out = []
    for i, phi in enumerate(p.relators):
        fp = fiber_product(phi, phi)
        bad = tuple(c for c in fp.components if c.iso_left and c.iso_right and not c.diagonal)
        out.append(RelatorVerdict(i, not bad, bad, NORMALITY_NOTE))
    return out
