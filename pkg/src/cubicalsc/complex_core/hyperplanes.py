"""Hyperplanes, their carriers and midcube complexes, and separation."""

from __future__ import annotations

from dataclasses import dataclass

from .cells import Cube, CubeComplex, FaceRef, Pattern, Subcomplex, face_corners, face_patterns, popcount


@dataclass(frozen=True)
class Hyperplane:
    id: str
    edges: tuple[str, ...]
    # (edge, cube, partner edge): the opposite-side step that first joined the edge
    witnesses: tuple[tuple[str, str, str], ...]
    carrier_cubes: tuple[str, ...]
    self_crossing: bool
    self_osculating: bool

    def as_dict(self) -> dict:
        return {"id": self.id, "edges": list(self.edges),
                "witnesses": [list(w) for w in self.witnesses],
                "carrier_cubes": list(self.carrier_cubes),
                "self_crossing": self.self_crossing, "self_osculating": self.self_osculating}


def crossing_directions(X: CubeComplex, cid: str, edges: frozenset[str]) -> list[int]:
    """Own directions of ``cid`` whose parallel edges lie in ``edges``."""
    c = X[cid]
    return [i for i in range(c.dim) if c.faces[(1 << i, 0)][0] in edges]


def hyperplanes(X: CubeComplex) -> list[Hyperplane]:
    parent = {e: e for e in X.edges}
    witness: dict[str, tuple[str, str, str]] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for cid in X.squares + X.cubes3:
        c = X[cid]
        for i in range(c.dim):
            bit = 1 << i
            rest = ((1 << c.dim) - 1) & ~bit
            base_edge = c.faces[(bit, 0)][0]
            for b in sorted(face_corners((rest, 0)))[1:]:
                e = c.faces[(bit, b)][0]
                ra, rb = find(base_edge), find(e)
                if ra != rb:
                    lo, hi = min(ra, rb), max(ra, rb)
                    parent[hi] = lo
                    for x, y in ((e, base_edge), (base_edge, e)):
                        witness.setdefault(x, (x, cid, y))
    classes: dict[str, list[str]] = {}
    for e in X.edges:
        classes.setdefault(find(e), []).append(e)
    ordered = sorted((sorted(v) for v in classes.values()), key=lambda v: v[0])
    cls = {e: k for k, edges in enumerate(ordered) for e in edges}
    dirs_by_cell: dict[str, dict[int, list[int]]] = {}
    for c in X:
        for i in range(c.dim):
            dirs_by_cell.setdefault(c.id, {}).setdefault(cls[c.faces[(1 << i, 0)][0]], []).append(i)
    carriers: dict[int, list[str]] = {k: [] for k in range(len(ordered))}
    crossing: set[int] = set()
    for cid, by_class in sorted(dirs_by_cell.items()):
        for k, ds in by_class.items():
            carriers[k].append(cid)
            if len(ds) > 1:
                crossing.add(k)
    osculating = _osculating_classes(X, cls)
    return [
        Hyperplane(id=f"H{k}", edges=tuple(edges),
                   witnesses=tuple(witness[e] for e in edges if e in witness),
                   carrier_cubes=tuple(carriers[k]), self_crossing=k in crossing,
                   self_osculating=k in osculating)
        for k, edges in enumerate(ordered)
    ]


def _osculating_classes(X: CubeComplex, cls: dict[str, int]) -> set[int]:
    """Classes with two distinct edges at a vertex that are not opposite sides of a common square."""
    opposite = set()
    for s in X.squares:
        c = X[s]
        for i in range(2):
            a, b = c.faces[(1 << i, 0)][0], c.faces[(1 << i, 2 >> i)][0]
            opposite.add(frozenset((a, b)))
    out = set()
    for v, inc in X.adjacency().items():
        at_v = sorted({e for e, _ in inc})
        for i, a in enumerate(at_v):
            for b in at_v[i + 1:]:
                if cls[a] == cls[b] and frozenset((a, b)) not in opposite:
                    out.add(cls[a])
    return out


def hyperplane_of_edge(hs: list[Hyperplane], e: str) -> Hyperplane:
    for H in hs:
        if e in H.edges:
            return H
    raise KeyError(e)


# ---------------------------------------------------------------------------
# crossing direction bookkeeping shared by carriers and midcube complexes


def _face_crossing(X: CubeComplex, g: str, i: int, pat: Pattern) -> tuple[str, int, list[int]]:
    """For a face of ``g`` containing direction ``i``: (face cell, its crossing direction, own masks)."""
    d, own = X[g].faces[pat]
    corners = face_corners(pat)
    to_own = dict(zip(corners, own))
    m = corners[0]
    j = (to_own[m] ^ to_own[m | (1 << i)]).bit_length() - 1
    return d, j, [to_own[c] for c in corners]


def _compress(mask: int, drop: int) -> int:
    low = mask & ((1 << drop) - 1)
    high = mask >> (drop + 1)
    return low | (high << drop)


def _expand(mask: int, at: int, bit: int) -> int:
    low = mask & ((1 << at) - 1)
    high = mask >> at
    return low | (bit << at) | (high << (at + 1))


def dual_name(g: str, i: int) -> str:
    return f"N[{g}/{i}]"


def side_name(g: str, i: int, b: int) -> str:
    return f"N[{g}/{i}/{b}]"


def mid_name(g: str, i: int) -> str:
    return f"M[{g}/{i}]"


def _side_of(X: CubeComplex, g: str, i: int, pat: Pattern) -> tuple[str, int, int, list[int]]:
    """A face of ``g`` not containing direction ``i``: identify it as a side of the face that does."""
    dirs, base = pat
    bit = 1 << i
    gpat = (dirs | bit, base & ~bit)
    gg, j, gown = _face_crossing(X, g, i, gpat)
    gcorners = face_corners(gpat)
    pos = {m: k for k, m in enumerate(gcorners)}
    corners = face_corners(pat)
    b = (gown[pos[corners[0]]] >> j) & 1
    owns = [_compress(gown[pos[m]], j) for m in corners]
    return gg, j, b, owns


def _carrier_cell(X: CubeComplex, g: str, i: int, side: int | None) -> Cube:
    """Dual cell (side None) or side cell of ``g`` crossed in own direction ``i``."""
    c = X[g]
    k = c.dim
    faces: dict[Pattern, FaceRef] = {}
    if side is None:
        name, dim = dual_name(g, i), k
        pats = [(p, p) for p in face_patterns(k)]
    else:
        name, dim = side_name(g, i, side), k - 1
        pats = [((_expand(fd, i, 0), _expand(fb, i, side)), (fd, fb)) for fd, fb in face_patterns(k - 1)]
    corners = [""] * (1 << dim)
    for gpat, lpat in pats:
        if gpat[0] >> i & 1:
            d, j, owns = _face_crossing(X, g, i, gpat)
            ref = (dual_name(d, j), tuple(owns))
        else:
            gg, j, b, owns = _side_of(X, g, i, gpat)
            if gpat[0] == 0:
                ref = (side_name(gg, j, b), (0,))
            else:
                ref = (side_name(gg, j, b), tuple(owns))
        faces[lpat] = ref
        if lpat[0] == 0:
            corners[lpat[1]] = ref[0]
    faces[((1 << dim) - 1, 0)] = (name, tuple(range(1 << dim)))
    return Cube(name, dim, tuple(corners), faces)


@dataclass(frozen=True, eq=False)
class Carrier:
    hyperplane: Hyperplane
    complex: CubeComplex
    map: object  # CombinatorialMap N(H) -> X
    dual_edges: frozenset[str]
    local_isometry: bool
    degenerate: bool

    def as_dict(self) -> dict:
        from .cells import describe

        return {"status": "Degenerate" if self.degenerate else "OK",
                "hyperplane": self.hyperplane.id, "local_isometry": self.local_isometry,
                "complex": describe(self.complex), "map": self.map.describe()}


def carrier(X: CubeComplex, H: Hyperplane) -> Carrier:
    """Abstract carrier N(H) and its tautological map to ``X``.

    Cells are named after the X-cell they come from: ``N[g/i]`` is ``g``
    crossed in its own direction ``i`` and ``N[g/i/b]`` is the side ``b`` of
    that crossing.  Self-crossing hyperplanes produce a degenerate carrier,
    which is still returned.
    """
    from ..morphisms import CombinatorialMap, check_local_isometry

    es = frozenset(H.edges)
    cells: dict[str, Cube] = {}
    images: dict[str, FaceRef] = {}
    for g in H.carrier_cubes:
        c = X[g]
        for i in crossing_directions(X, g, es):
            cube = _carrier_cell(X, g, i, None)
            cells[cube.id] = cube
            images[cube.id] = (g, tuple(range(1 << c.dim)))
            for b in (0, 1):
                sc = _carrier_cell(X, g, i, b)
                if sc.id in cells:
                    continue
                cells[sc.id] = sc
                rest = ((1 << c.dim) - 1) & ~(1 << i)
                images[sc.id] = c.faces[(rest, b << i)]
    NH = CubeComplex(cells.values())
    f = CombinatorialMap(NH, X, images)
    dual = frozenset(dual_name(e, 0) for e in H.edges)
    degenerate = H.self_crossing
    iso = False if degenerate else bool(check_local_isometry(f))
    return Carrier(H, NH, f, dual, iso, degenerate)


def midcube_complex(X: CubeComplex, H: Hyperplane) -> tuple[CubeComplex, dict[str, str]]:
    """The hyperplane as a cube complex of midcubes, with each midcube's source cell.

    Only meaningful when ``H`` does not self-cross.
    """
    es = frozenset(H.edges)
    cells: dict[str, Cube] = {}
    origin: dict[str, str] = {}
    for g in H.carrier_cubes:
        c = X[g]
        for i in crossing_directions(X, g, es):
            name = mid_name(g, i)
            dim = c.dim - 1
            faces: dict[Pattern, FaceRef] = {}
            corners = [""] * (1 << dim)
            for fd, fb in face_patterns(dim):
                gpat = (_expand(fd, i, 1), _expand(fb, i, 0))
                d, j, owns = _face_crossing(X, g, i, gpat)
                gc = face_corners(gpat)
                low = [owns[k] for k, m in enumerate(gc) if not m >> i & 1]
                ref = (mid_name(d, j), tuple(_compress(o, j) for o in low))
                faces[(fd, fb)] = ref
                if fd == 0:
                    corners[fb] = ref[0]
                    faces[(fd, fb)] = (ref[0], (0,))
            cells[name] = Cube(name, dim, tuple(corners), faces)
            origin[name] = g
    return CubeComplex(cells.values()), origin


def separation(X: CubeComplex, H: Hyperplane) -> list[Subcomplex]:
    """Components of X with every cell crossing H removed."""
    es = frozenset(H.edges)
    crossing = set(H.carrier_cubes)
    keep = [c for c in X.cells if c not in crossing]
    for c in keep:
        assert not (X[c].dim >= 1 and crossing_directions(X, c, es))
    return [Subcomplex(X, comp, True) for comp in X.components(keep)]
