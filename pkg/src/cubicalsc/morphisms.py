"""Combinatorial maps between cube complexes and the local-isometry test."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .complex_core.cells import (
    ComplexError,
    CubeComplex,
    FaceRef,
    cube_symmetries,
    face_corners,
    format_oriented,
    parse_oriented,
)
from .complex_core.links import link


class BoundaryMismatch(ComplexError):
    kind = "BoundaryMismatch"


class MissingAssignment(ComplexError):
    kind = "MissingAssignment"


@dataclass(frozen=True, eq=False)
class CombinatorialMap:
    """Cell ``c`` of the domain goes to ``cells[c] = (target id, own)``.

    ``own[m]`` is the corner mask in the target's coordinates of corner ``m``
    of ``c``; for edges ``(0, 1)`` is orientation preserving.
    """

    domain: CubeComplex
    codomain: CubeComplex
    cells: Mapping[str, FaceRef]

    def __call__(self, cid: str) -> str:
        return self.cells[cid][0]

    def image(self, cid: str) -> FaceRef:
        return self.cells[cid]

    def edge_image(self, e: str) -> tuple[str, int]:
        t, own = self.cells[e]
        return t, (1 if own == (0, 1) else -1)

    def compose(self, other: "CombinatorialMap") -> "CombinatorialMap":
        """``other`` after ``self``."""
        out = {}
        for c, (t, own) in self.cells.items():
            t2, own2 = other.cells[t]
            out[c] = (t2, tuple(own2[o] for o in own))
        return CombinatorialMap(self.domain, other.codomain, out)

    def restrict(self, sub: CubeComplex) -> "CombinatorialMap":
        return CombinatorialMap(sub, self.codomain, {c: self.cells[c] for c in sub.cells})

    def describe(self) -> dict:
        out: dict = {"vertex_map": {}, "edge_map": {}, "square_map": {}}
        for c, (t, own) in self.cells.items():
            dim = self.domain[c].dim
            if dim == 0:
                out["vertex_map"][c] = t
            elif dim == 1:
                out["edge_map"][c] = format_oriented(t, 1 if own == (0, 1) else -1)
            elif dim == 2:
                out["square_map"][c] = {"id": t, "corners": list(own)}
            else:
                out.setdefault("cube_map", {})[c] = {"id": t, "corners": list(own)}
        return out

    def is_injective(self) -> bool:
        return len({t for t, _ in self.cells.values()}) == len(self.cells)

    def is_isomorphism(self) -> bool:
        return self.is_injective() and len(self.cells) == len(self.codomain)


def cell_commutes(f: Mapping[str, FaceRef], domain: CubeComplex, codomain: CubeComplex,
                  cid: str, target: str, own: tuple[int, ...]) -> str | None:
    """None if sending ``cid`` to ``(target, own)`` agrees with ``f`` on every face, else a reason."""
    c = domain[cid]
    t = codomain[target]
    if t.dim != c.dim:
        return f"{cid} (dim {c.dim}) sent to {target} (dim {t.dim})"
    for pat, (d, own_d) in c.faces.items():
        if d == cid:
            continue
        if d not in f:
            return f"face {d} of {cid} is unassigned"
        dt, rho = f[d]
        img = [own[m] for m in face_corners(pat)]
        dirs = 0
        for m in img:
            dirs |= m ^ img[0]
        tpat = (dirs, min(img) & ~dirs)
        if tpat not in t.faces:
            return f"{cid}: image of face {d} is not a face of {target}"
        ref, own_t = t.faces[tpat]
        if ref != dt:
            return f"{cid}: face {d} goes to {dt} but the matching face of {target} is {ref}"
        pos = {m: k for k, m in enumerate(face_corners(tpat))}
        for k, m in enumerate(img):
            if own_t[pos[m]] != rho[own_d[k]]:
                return f"{cid}: face {d} is attached to {target} with the wrong orientation"
    return None


def check_commutes(f: Mapping[str, FaceRef], domain: CubeComplex, codomain: CubeComplex) -> None:
    for cid in domain.cells:
        if cid not in f:
            raise MissingAssignment(f"cell {cid} is unassigned", cid)
    for k in range(4):
        for cid in domain.of_dim(k):
            t, own = f[cid]
            if t not in codomain:
                raise BoundaryMismatch(f"{cid} sent to unknown cell {t}", cid)
            why = cell_commutes(f, domain, codomain, cid, t, tuple(own))
            if why:
                raise BoundaryMismatch(why, cid)


def validate_map(raw: Mapping, domain: CubeComplex, codomain: CubeComplex) -> CombinatorialMap:
    """Map from a description with ``vertex_map``, ``edge_map``, ``square_map`` (and ``cube_map``).

    Square and cube entries may be a bare target id; the rotation/reflection
    is then the first symmetry (in a fixed order) that commutes.
    """
    f: dict[str, FaceRef] = {}
    vm = raw.get("vertex_map", {}) or {}
    for v in domain.vertices:
        if v not in vm:
            raise MissingAssignment(f"vertex {v} is unassigned", v)
        f[v] = (vm[v], (0,))
    em = raw.get("edge_map", {}) or {}
    for e in domain.edges:
        if e not in em:
            raise MissingAssignment(f"edge {e} is unassigned", e)
        t, s = parse_oriented(em[e])
        f[e] = (t, (0, 1) if s > 0 else (1, 0))
    for key, dim in (("square_map", 2), ("cube_map", 3)):
        table = raw.get(key, {}) or {}
        for c in domain.of_dim(dim):
            if c not in table:
                raise MissingAssignment(f"{'square' if dim == 2 else 'cube'} {c} is unassigned", c)
            entry = table[c]
            if isinstance(entry, Mapping):
                t = entry.get("id")
                cands = [tuple(entry["corners"])] if "corners" in entry else cube_symmetries(dim)
            else:
                t, cands = entry, cube_symmetries(dim)
            if t not in codomain:
                raise BoundaryMismatch(f"{c} sent to unknown cell {t}", c)
            for own in cands:
                if cell_commutes(f, domain, codomain, c, t, own) is None:
                    f[c] = (t, own)
                    break
            else:
                raise BoundaryMismatch(f"{c}: no orientation of {t} matches its boundary", c)
    check_commutes(f, domain, codomain)
    return CombinatorialMap(domain, codomain, f)


@dataclass(frozen=True)
class IsometryVerdict:
    ok: bool
    vertex: str | None = None
    problem: str | None = None
    witness: tuple = ()

    def __bool__(self) -> bool:
        return self.ok

    def as_dict(self) -> dict:
        if self.ok:
            return {"status": "LocalIsometry"}
        return {"status": "NotLocalIsometry", "vertex": self.vertex, "problem": self.problem,
                "witness": [list(w) if isinstance(w, tuple) else w for w in self.witness]}


def check_local_isometry(f: CombinatorialMap) -> IsometryVerdict:
    """Injective on link nodes, arcs and triangles at every vertex, with full image."""
    for v in f.domain.vertices:
        L = link(f.domain, v)
        w = f(v)
        node_img: dict = {}
        for e, end in L.nodes:
            t, own = f.image(e)
            img = (t, own[end])
            if img in node_img:
                return IsometryVerdict(False, v, "nodes-not-injective", ((e, end), node_img[img]))
            node_img[img] = (e, end)
        arc_img = set()
        for a in L.arcs:
            t, own = f.image(a.square)
            img = (t, own[a.corner])
            if img in arc_img:
                return IsometryVerdict(False, v, "arcs-not-injective", (a.square, a.corner))
            arc_img.add(img)
        tri_img = set()
        for tr in L.triangles:
            t, own = f.image(tr.cube)
            img = (t, own[tr.corner])
            if img in tri_img:
                return IsometryVerdict(False, v, "triangles-not-injective", (tr.cube, tr.corner))
            tri_img.add(img)
        M = link(f.codomain, w)
        for a in M.arcs:
            if all(n in node_img for n in a.nodes) and (a.square, a.corner) not in arc_img:
                return IsometryVerdict(False, v, "image-not-full", (a.square, a.corner))
        for tr in M.triangles:
            if all(n in node_img for n in tr.nodes) and (tr.cube, tr.corner) not in tri_img:
                return IsometryVerdict(False, v, "image-not-full", (tr.cube, tr.corner))
    return IsometryVerdict(True)


def identity_map(X: CubeComplex) -> CombinatorialMap:
    return CombinatorialMap(X, X, {c.id: (c.id, tuple(range(1 << c.dim))) for c in X})


def inclusion(sub: CubeComplex, X: CubeComplex) -> CombinatorialMap:
    return CombinatorialMap(sub, X, {c.id: (c.id, tuple(range(1 << c.dim))) for c in sub})
