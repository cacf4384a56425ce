"""Cells and complexes.

A ``k``-cube is stored with its own coordinates: corners are indexed by
bitmasks ``0 .. 2**k - 1`` and every face is a pattern ``(dirs, base)`` where
``dirs`` is the bitmask of free directions and ``base`` fixes the others.
For each face pattern a cube records which cell of the complex realises it
together with the *own* mask, in that cell's coordinates, of each corner of
the face (corners listed in ascending cube-mask order).  All identifications
in the complex live in these tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping

Pattern = tuple[int, int]
FaceRef = tuple[str, tuple[int, ...]]

# square boundary walk, as corner masks: x0 runs 0->1, x1 runs 1->3, ...
SQUARE_WALK = (0, 1, 3, 2)


class ComplexError(ValueError):
    """Structured validation error; ``kind`` names the violated invariant."""

    kind = "ComplexError"

    def __init__(self, message: str, cell: str | None = None):
        super().__init__(message)
        self.cell = cell

    def as_dict(self) -> dict:
        return {"error": self.kind, "cell": self.cell, "message": str(self)}


class DanglingReference(ComplexError):
    kind = "DanglingReference"


class NonClosingSquareBoundary(ComplexError):
    kind = "NonClosingSquareBoundary"


class Inconsistent3CubePairing(ComplexError):
    kind = "Inconsistent3CubePairing"


class DuplicateId(ComplexError):
    kind = "DuplicateId"


class UnknownVertex(ComplexError):
    kind = "UnknownVertex"


class NotConnected(ComplexError):
    kind = "NotConnected"


class MalformedInput(ComplexError):
    kind = "MalformedInput"


def submasks(dirs: int) -> list[int]:
    """All submasks of ``dirs`` in ascending order."""
    out = []
    s = dirs
    while True:
        out.append(s)
        if s == 0:
            break
        s = (s - 1) & dirs
    return sorted(out)


def face_corners(pattern: Pattern) -> list[int]:
    dirs, base = pattern
    return [base | s for s in submasks(dirs)]


def face_patterns(dim: int) -> list[Pattern]:
    """Every face pattern of a ``dim``-cube, including the cube itself."""
    full = (1 << dim) - 1
    pats = []
    for dirs in range(full + 1):
        rest = full & ~dirs
        for base in submasks(rest):
            pats.append((dirs, base))
    return sorted(pats, key=lambda p: (bin(p[0]).count("1"), p))


def popcount(x: int) -> int:
    return bin(x).count("1")


def is_cube_isomorphism(images: Mapping[int, int] | tuple[int, ...], dim: int) -> bool:
    """Whether corner masks ``m -> images[m]`` preserve cube adjacency bijectively."""
    n = 1 << dim
    vals = [images[m] for m in range(n)]
    if sorted(vals) != list(range(n)):
        return False
    for m in range(n):
        for i in range(dim):
            if popcount(vals[m] ^ vals[m ^ (1 << i)]) != 1:
                return False
    return True


def cube_symmetries(dim: int) -> list[tuple[int, ...]]:
    """The hyperoctahedral group acting on corner masks, in a fixed order."""
    from itertools import permutations, product

    out = []
    for perm in permutations(range(dim)):
        for flips in product((0, 1), repeat=dim):
            flipmask = sum(f << i for i, f in enumerate(flips))
            img = []
            for m in range(1 << dim):
                x = 0
                for i in range(dim):
                    if (m >> i) & 1:
                        x |= 1 << perm[i]
                img.append(x ^ flipmask)
            out.append(tuple(img))
    return sorted(set(out))


@dataclass(frozen=True)
class Cube:
    id: str
    dim: int
    corners: tuple[str, ...]
    faces: Mapping[Pattern, FaceRef] = field(hash=False, compare=False)

    def face(self, pattern: Pattern) -> FaceRef:
        return self.faces[pattern]

    def facets(self) -> list[tuple[Pattern, str]]:
        out = []
        for i in range(self.dim):
            bit = 1 << i
            rest = ((1 << self.dim) - 1) & ~bit
            for side in (0, bit):
                out.append(((rest, side), self.faces[(rest, side)][0]))
        return out

    def edge_at(self, mask: int, direction: int) -> tuple[str, int]:
        """Edge of this cube in ``direction`` through corner ``mask`` and the end index at that corner."""
        bit = 1 << direction
        eid, own = self.faces[(bit, mask & ~bit)]
        return eid, own[1 if mask & bit else 0]


def own_masks_for(corners_in_order: list[int], own: tuple[int, ...]) -> dict[int, int]:
    return dict(zip(corners_in_order, own))


class CubeComplex:
    """A finite cube complex of dimension at most 3.

    Construct through :func:`validate` (from a file description) or the
    builders; the constructor itself trusts its input.
    """

    def __init__(self, cells: Iterable[Cube]):
        table: dict[str, Cube] = {}
        for c in cells:
            if c.id in table:
                raise DuplicateId(f"duplicate cell id {c.id!r}", c.id)
            table[c.id] = c
        self.cells: dict[str, Cube] = dict(sorted(table.items()))
        by_dim: list[list[str]] = [[], [], [], []]
        for cid, c in self.cells.items():
            by_dim[c.dim].append(cid)
        self.vertices: tuple[str, ...] = tuple(by_dim[0])
        self.edges: tuple[str, ...] = tuple(by_dim[1])
        self.squares: tuple[str, ...] = tuple(by_dim[2])
        self.cubes3: tuple[str, ...] = tuple(by_dim[3])
        self.dimension = max((c.dim for c in self.cells.values()), default=0)

    def __repr__(self) -> str:
        return (f"CubeComplex(V={len(self.vertices)}, E={len(self.edges)}, "
                f"S={len(self.squares)}, C={len(self.cubes3)})")

    def __getitem__(self, cid: str) -> Cube:
        return self.cells[cid]

    def __contains__(self, cid: str) -> bool:
        return cid in self.cells

    def __iter__(self) -> Iterator[Cube]:
        return iter(self.cells.values())

    def __len__(self) -> int:
        return len(self.cells)

    def of_dim(self, k: int) -> tuple[str, ...]:
        return (self.vertices, self.edges, self.squares, self.cubes3)[k]

    def ends(self, e: str) -> tuple[str, str]:
        c = self.cells[e]
        return c.corners[0], c.corners[1]

    def euler_characteristic(self) -> int:
        return sum((-1) ** c.dim for c in self.cells.values())

    @cached_property
    def facet_incidences(self) -> dict[str, list[tuple[str, Pattern]]]:
        """cell -> list of (coface, pattern) for every codimension-1 occurrence."""
        inc: dict[str, list[tuple[str, Pattern]]] = {cid: [] for cid in self.cells}
        for c in self.cells.values():
            for pat, f in c.facets():
                inc[f].append((c.id, pat))
        return inc

    @cached_property
    def incident_cells(self) -> dict[str, frozenset[str]]:
        """vertex -> all cells having it as a corner."""
        inc: dict[str, set[str]] = {v: set() for v in self.vertices}
        for c in self.cells.values():
            for v in c.corners:
                inc[v].add(c.id)
        return {v: frozenset(s) for v, s in inc.items()}

    def adjacency(self) -> dict[str, list[tuple[str, str]]]:
        """vertex -> sorted (edge, other end) pairs; loops appear twice."""
        adj: dict[str, list[tuple[str, str]]] = {v: [] for v in self.vertices}
        for e in self.edges:
            u, v = self.ends(e)
            adj[u].append((e, v))
            adj[v].append((e, u))
        for v in adj:
            adj[v].sort()
        return adj

    def closure(self, cell_ids: Iterable[str]) -> frozenset[str]:
        out: set[str] = set()
        for cid in cell_ids:
            if cid not in self.cells:
                raise DanglingReference(f"unknown cell {cid!r}", cid)
            for ref, _ in self.cells[cid].faces.values():
                out.add(ref)
        return frozenset(out)

    def subcomplex(self, cell_ids: Iterable[str]) -> "CubeComplex":
        ids = self.closure(cell_ids)
        return CubeComplex(self.cells[c] for c in ids)

    def components(self, cell_ids: Iterable[str] | None = None) -> list[frozenset[str]]:
        """Connected components (as face-closed cell sets) of a face-closed set."""
        ids = set(self.cells) if cell_ids is None else set(cell_ids)
        parent = {c: c for c in ids}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for cid in ids:
            for v in self.cells[cid].corners:
                a, b = find(cid), find(v)
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict[str, set[str]] = {}
        for c in ids:
            groups.setdefault(find(c), set()).add(c)
        return sorted((frozenset(g) for g in groups.values()), key=lambda g: min(g))

    def is_connected(self) -> bool:
        return len(self.components()) <= 1


@dataclass(frozen=True, eq=False)
class Subcomplex:
    parent: CubeComplex
    cells: frozenset[str]
    connected: bool
    metadata: Mapping[str, object] = field(default_factory=dict)

    @classmethod
    def of(cls, parent: CubeComplex, cell_ids: Iterable[str], **metadata) -> "Subcomplex":
        cells = parent.closure(cell_ids)
        connected = len(parent.components(cells)) <= 1
        return cls(parent, cells, connected, dict(metadata))

    def complex(self) -> CubeComplex:
        return self.parent.subcomplex(self.cells)

    def of_dim(self, k: int) -> list[str]:
        return sorted(c for c in self.cells if self.parent[c].dim == k)

    def __contains__(self, cid: str) -> bool:
        return cid in self.cells

    def __len__(self) -> int:
        return len(self.cells)


# ---------------------------------------------------------------------------
# building cubes


def make_vertex(vid: str) -> Cube:
    return Cube(vid, 0, (vid,), {(0, 0): (vid, (0,))})


def make_edge(eid: str, u: str, v: str) -> Cube:
    faces = {(0, 0): (u, (0,)), (0, 1): (v, (0,)), (1, 0): (eid, (0, 1))}
    return Cube(eid, 1, (u, v), faces)


def parse_oriented(ref: str) -> tuple[str, int]:
    if not isinstance(ref, str) or len(ref) < 2 or ref[-1] not in "+-":
        raise MalformedInput(f"bad oriented reference {ref!r}", str(ref))
    return ref[:-1], (1 if ref[-1] == "+" else -1)


def format_oriented(cid: str, sign: int) -> str:
    return f"{cid}{'+' if sign > 0 else '-'}"


def make_square(sid: str, boundary: list[tuple[str, int]], edge_cells: Mapping[str, Cube]) -> Cube:
    """Square from four oriented edges traversed as corners 0 -> 1 -> 3 -> 2 -> 0."""
    if len(boundary) != 4:
        raise NonClosingSquareBoundary(f"square {sid} has {len(boundary)} boundary edges", sid)
    for e, _ in boundary:
        if e not in edge_cells:
            raise DanglingReference(f"square {sid} references unknown edge {e!r}", sid)

    def tail_head(e, s):
        u, v = edge_cells[e].corners
        return (u, v) if s > 0 else (v, u)

    walk = [tail_head(e, s) for e, s in boundary]
    for k in range(4):
        if walk[k][1] != walk[(k + 1) % 4][0]:
            raise NonClosingSquareBoundary(
                f"square {sid}: edge {boundary[k][0]} does not meet {boundary[(k + 1) % 4][0]}", sid)
    corners = [""] * 4
    for k in range(4):
        corners[SQUARE_WALK[k]] = walk[k][0]
    faces: dict[Pattern, FaceRef] = {(3, 0): (sid, (0, 1, 2, 3))}
    for m in range(4):
        faces[(0, m)] = (corners[m], (0,))
    for k, (e, s) in enumerate(boundary):
        a, b = SQUARE_WALK[k], SQUARE_WALK[(k + 1) % 4]
        dirs = a ^ b
        # traversal a -> b: tail end 0 when positively oriented
        ta, tb = (0, 1) if s > 0 else (1, 0)
        lo, hi = (a, b) if a < b else (b, a)
        own = (ta, tb) if lo == a else (tb, ta)
        faces[(dirs, lo & ~dirs)] = (e, own)
    return Cube(sid, 2, tuple(corners), faces)


def square_boundary(cube: Cube) -> list[tuple[str, int]]:
    """Inverse of :func:`make_square`: the oriented boundary walk."""
    out = []
    for k in range(4):
        a, b = SQUARE_WALK[k], SQUARE_WALK[(k + 1) % 4]
        dirs = a ^ b
        lo = min(a, b)
        e, own = cube.faces[(dirs, lo & ~dirs)]
        end_a = own[0] if a == lo else own[1]
        out.append((e, 1 if end_a == 0 else -1))
    return out


def compose_face(outer: Cube, pattern: Pattern, table: Mapping[str, Cube]) -> dict[Pattern, FaceRef]:
    """Faces of ``outer``'s face at ``pattern``, expressed through the face cell.

    Returns, for each sub-pattern (in outer coordinates) of ``pattern``, what
    the face cell claims realises it.
    """
    fid, own = outer.faces[pattern]
    fcell = table[fid]
    corners = face_corners(pattern)
    to_own = dict(zip(corners, own))
    out: dict[Pattern, FaceRef] = {}
    for sdirs in submasks(pattern[0]):
        rest = pattern[0] & ~sdirs
        for sb in submasks(rest):
            spat = (sdirs, pattern[1] | sb)
            scorners = face_corners(spat)
            own_corners = [to_own[m] for m in scorners]
            odirs = 0
            for m in own_corners:
                odirs |= m ^ own_corners[0]
            obase = min(own_corners) & ~odirs
            sref, sown = fcell.faces[(odirs, obase)]
            omap = dict(zip(face_corners((odirs, obase)), sown))
            out[spat] = (sref, tuple(omap[m] for m in own_corners))
    return out


def check_cube(cube: Cube, table: Mapping[str, Cube]) -> None:
    """Consistency of a cube's face table against the cells it references."""
    for pat, (ref, own) in cube.faces.items():
        if ref not in table:
            raise DanglingReference(f"cell {cube.id} references unknown cell {ref!r}", cube.id)
        k = popcount(pat[0])
        fcell = table[ref]
        if fcell.dim != k:
            raise DanglingReference(f"cell {cube.id}: face {ref} has dimension {fcell.dim}, expected {k}", cube.id)
        if len(own) != 1 << k or not is_cube_isomorphism(own, k):
            raise ComplexError(f"cell {cube.id}: face {ref} attached by a non-isomorphism", cube.id)
        for m, o in zip(face_corners(pat), own):
            if fcell.corners[o] != cube.corners[m]:
                raise ComplexError(f"cell {cube.id}: corner mismatch on face {ref}", cube.id)
    for pat in cube.faces:
        if pat[0] == 0 or pat == ((1 << cube.dim) - 1, 0):
            continue
        for spat, sref in compose_face(cube, pat, table).items():
            if cube.faces[spat] != sref:
                raise ComplexError(f"cell {cube.id}: faces disagree at pattern {spat}", cube.id)


# ---------------------------------------------------------------------------
# 3-cubes from six squares with explicit edge-slot pairings


def make_cube3(cid: str, face_refs: list[str], pairings: list, table: Mapping[str, Cube]) -> Cube:
    """Assemble a 3-cube from six squares and twelve slot pairings.

    Slot ``k`` of a square is its ``k``-th boundary edge.  Each pairing
    ``[[f, k], [g, l]]`` glues slot ``k`` of face ``f`` to slot ``l`` of face
    ``g``; they must carry the same edge.  Square orientation signs in
    ``face_refs`` are accepted but the geometry comes from the pairings.
    """
    if len(face_refs) != 6:
        raise Inconsistent3CubePairing(f"3-cube {cid} needs 6 faces, got {len(face_refs)}", cid)
    sq = []
    for r in face_refs:
        sid = r[:-1] if isinstance(r, str) and r and r[-1] in "+-" else r
        if sid not in table or table[sid].dim != 2:
            raise DanglingReference(f"3-cube {cid} references unknown square {sid!r}", cid)
        sq.append(table[sid])
    if len(pairings) != 12:
        raise Inconsistent3CubePairing(f"3-cube {cid} needs 12 slot pairings, got {len(pairings)}", cid)
    seen = set()
    # union-find on face corners (face index, square corner mask)
    parent = {(f, m): (f, m) for f in range(6) for m in range(4)}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    def slot(f, k):
        a, b = SQUARE_WALK[k], SQUARE_WALK[(k + 1) % 4]
        dirs = a ^ b
        lo = min(a, b)
        e, own = sq[f].faces[(dirs, lo & ~dirs)]
        ends = {lo: own[0], lo | dirs: own[1]}
        return e, {ends[a]: a, ends[b]: b}

    try:
        pairs = [((int(p[0][0]), int(p[0][1])), (int(p[1][0]), int(p[1][1]))) for p in pairings]
    except (TypeError, ValueError, IndexError):
        raise Inconsistent3CubePairing(f"3-cube {cid}: malformed pairing list", cid)
    for (f, k), (g, l) in pairs:
        for s in ((f, k), (g, l)):
            if not (0 <= s[0] < 6 and 0 <= s[1] < 4) or s in seen:
                raise Inconsistent3CubePairing(f"3-cube {cid}: slot {s} invalid or reused", cid)
            seen.add(s)
        e1, ends1 = slot(f, k)
        e2, ends2 = slot(g, l)
        if e1 != e2:
            raise Inconsistent3CubePairing(f"3-cube {cid}: slots {(f, k)} and {(g, l)} carry different edges", cid)
        for end in (0, 1):
            union((f, ends1[end]), (g, ends2[end]))
    classes: dict = {}
    for x in parent:
        classes.setdefault(find(x), []).append(x)
    if len(classes) != 8 or any(len(v) != 3 for v in classes.values()):
        raise Inconsistent3CubePairing(f"3-cube {cid}: corners do not close up into 8 triples", cid)
    cls_of = {x: find(x) for x in parent}
    # adjacency of classes through square edges
    nbrs: dict = {c: set() for c in classes}
    for f in range(6):
        for m in range(4):
            for i in range(2):
                a, b = cls_of[(f, m)], cls_of[(f, m ^ (1 << i))]
                if a == b:
                    raise Inconsistent3CubePairing(f"3-cube {cid}: degenerate corner identification", cid)
                nbrs[a].add(b)
    root = min(classes)
    if len(nbrs[root]) != 3:
        raise Inconsistent3CubePairing(f"3-cube {cid}: corner of wrong valence", cid)
    coord = {root: 0}
    for i, n in enumerate(sorted(nbrs[root])):
        coord[n] = 1 << i
    for _ in range(3):
        for c in classes:
            if c in coord:
                continue
            known = [coord[n] for n in nbrs[c] if n in coord]
            if len(known) >= 2:
                val = 0
                for k in known:
                    val |= k
                coord[c] = val
    if sorted(coord.values()) != list(range(8)) or len(coord) != 8:
        raise Inconsistent3CubePairing(f"3-cube {cid}: corners do not form a cube", cid)
    for c in classes:
        for n in nbrs[c]:
            if popcount(coord[c] ^ coord[n]) != 1:
                raise Inconsistent3CubePairing(f"3-cube {cid}: corners do not form a cube", cid)
    corners = [""] * 8
    faces: dict[Pattern, FaceRef] = {(7, 0): (cid, tuple(range(8)))}
    face_own: dict[Pattern, dict[int, tuple[int, int]]] = {}
    for f in range(6):
        cmask = {coord[cls_of[(f, m)]]: m for m in range(4)}
        dirs = 0
        ms = sorted(cmask)
        for m in ms:
            dirs |= m ^ ms[0]
        if popcount(dirs) != 2:
            raise Inconsistent3CubePairing(f"3-cube {cid}: face {f} is not a square of the cube", cid)
        pat = (dirs, ms[0] & ~dirs)
        if pat in faces:
            raise Inconsistent3CubePairing(f"3-cube {cid}: two faces occupy the same side", cid)
        faces[pat] = (sq[f].id, tuple(cmask[m] for m in ms))
        for m in ms:
            corners[m] = sq[f].corners[cmask[m]]
    # lower faces through the squares
    for pat in list(faces):
        if popcount(pat[0]) != 2:
            continue
        tmp = Cube(cid, 3, tuple(corners), faces)
        for spat, ref in compose_face(tmp, pat, table).items():
            if spat in faces and faces[spat] != ref:
                raise Inconsistent3CubePairing(f"3-cube {cid}: faces disagree on {ref[0]}", cid)
            faces[spat] = ref
    cube = Cube(cid, 3, tuple(corners), faces)
    check_cube(cube, {**table, cid: cube})
    return cube


def cube3_description(cube: Cube) -> tuple[list[str], list]:
    """Face list and slot pairings describing a 3-cube (inverse of make_cube3)."""
    pats = [(7 & ~(1 << d), b << d) for d in range(3) for b in (0, 1)]
    refs = [format_oriented(cube.faces[p][0], 1) for p in pats]
    slots: dict[Pattern, list[tuple[int, int]]] = {}
    for fi, p in enumerate(pats):
        own = dict(zip(face_corners(p), cube.faces[p][1]))
        inv = {o: m for m, o in own.items()}
        for k in range(4):
            a, b = inv[SQUARE_WALK[k]], inv[SQUARE_WALK[(k + 1) % 4]]
            d = a ^ b
            slots.setdefault((d, min(a, b) & ~d), []).append((fi, k))
    pairings = [[list(v[0]), list(v[1])] for _, v in sorted(slots.items())]
    return refs, pairings


# ---------------------------------------------------------------------------
# file description <-> complex


def validate(raw: Mapping) -> CubeComplex:
    """Build a :class:`CubeComplex` from a complex description, checking all invariants."""
    if not isinstance(raw, Mapping):
        raise MalformedInput("complex description must be an object")
    seen: set[str] = set()

    def claim(cid):
        if not isinstance(cid, str) or not cid:
            raise MalformedInput(f"bad cell id {cid!r}", str(cid))
        if cid in seen:
            raise DuplicateId(f"duplicate cell id {cid!r}", cid)
        seen.add(cid)

    table: dict[str, Cube] = {}
    for v in raw.get("vertices", []):
        claim(v)
        table[v] = make_vertex(v)
    for e in raw.get("edges", []):
        eid = e.get("id") if isinstance(e, Mapping) else None
        claim(eid)
        ends = e.get("ends", [])
        if len(ends) != 2:
            raise MalformedInput(f"edge {eid} needs two ends", eid)
        for u in ends:
            if u not in table or table[u].dim != 0:
                raise DanglingReference(f"edge {eid} references unknown vertex {u!r}", eid)
        table[eid] = make_edge(eid, ends[0], ends[1])
    edge_cells = {k: c for k, c in table.items() if c.dim == 1}
    for s in raw.get("squares", []):
        sid = s.get("id") if isinstance(s, Mapping) else None
        claim(sid)
        bnd = [parse_oriented(r) for r in s.get("boundary", [])]
        table[sid] = make_square(sid, bnd, edge_cells)
    for c in raw.get("cubes", []):
        cid = c.get("id") if isinstance(c, Mapping) else None
        claim(cid)
        table[cid] = make_cube3(cid, list(c.get("faces", [])), list(c.get("pairings", [])), table)
    X = CubeComplex(table.values())
    declared = raw.get("dim")
    if declared is not None and (not isinstance(declared, int) or declared > 3 or declared < X.dimension):
        raise MalformedInput(f"declared dim {declared} does not fit the cells (dimension {X.dimension})")
    return X


def describe(X: CubeComplex) -> dict:
    """File description of ``X`` (round-trips through :func:`validate`)."""
    out = {
        "dim": X.dimension,
        "vertices": list(X.vertices),
        "edges": [{"id": e, "ends": list(X.ends(e))} for e in X.edges],
        "squares": [
            {"id": s, "boundary": [format_oriented(e, sg) for e, sg in square_boundary(X[s])]}
            for s in X.squares
        ],
    }
    if X.cubes3:
        cubes = []
        for c in X.cubes3:
            refs, pairings = cube3_description(X[c])
            cubes.append({"id": c, "faces": refs, "pairings": pairings})
        out["cubes"] = cubes
    return out
