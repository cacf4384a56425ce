"""Constructors for standard complexes used throughout the tests and CLI examples."""

from __future__ import annotations

import random
from itertools import product as iproduct
from typing import Iterable, Sequence

from .cells import (
    Cube,
    CubeComplex,
    FaceRef,
    Pattern,
    face_corners,
    face_patterns,
    make_edge,
    make_square,
    make_vertex,
    popcount,
)

AXES = "xyz"


def graph(vertices: Iterable[str], edges: Iterable[tuple[str, str, str]]) -> CubeComplex:
    """A 1-dimensional complex from ``(id, u, v)`` triples."""
    cells = [make_vertex(v) for v in vertices]
    cells += [make_edge(e, u, v) for e, u, v in edges]
    return CubeComplex(cells)


def point(name: str = "o") -> CubeComplex:
    return CubeComplex([make_vertex(name)])


def rose(labels: Sequence[str], base: str = "o") -> CubeComplex:
    """Bouquet of circles, one loop per label."""
    return graph([base], [(a, base, base) for a in labels])


def path_graph(n: int, prefix: str = "p") -> CubeComplex:
    return graph([f"{prefix}{i}" for i in range(n + 1)],
                 [(f"{prefix}e{i}", f"{prefix}{i}", f"{prefix}{i + 1}") for i in range(n)])


def cycle_graph(n: int, prefix: str = "c") -> CubeComplex:
    return graph([f"{prefix}{i}" for i in range(n)],
                 [(f"{prefix}e{i}", f"{prefix}{i}", f"{prefix}{(i + 1) % n}") for i in range(n)])


def random_tree(n_edges: int, rng: random.Random, prefix: str = "t") -> CubeComplex:
    verts = [f"{prefix}{0:03d}"]
    edges = []
    for i in range(1, n_edges + 1):
        parent = rng.choice(verts)
        v = f"{prefix}{i:03d}"
        verts.append(v)
        edges.append((f"{prefix}e{i:03d}", parent, v))
    return graph(verts, edges)


def square_complex(squares: Iterable[tuple[str, Sequence[str]]], vertices: Iterable[str],
                   edges: Iterable[tuple[str, str, str]]) -> CubeComplex:
    """Complex from explicit squares with boundaries like ``["a+", "b+", "a-", "b-"]``."""
    from .cells import parse_oriented

    base = graph(vertices, edges)
    edge_cells = {e: base[e] for e in base.edges}
    cells = list(base)
    for sid, bnd in squares:
        cells.append(make_square(sid, [parse_oriented(r) for r in bnd], edge_cells))
    return CubeComplex(cells)


def torus() -> CubeComplex:
    """One vertex, loops a and b, one square a b a^-1 b^-1."""
    return square_complex([("s", ["a+", "b+", "a-", "b-"])], ["v"], [("a", "v", "v"), ("b", "v", "v")])


# ---------------------------------------------------------------------------
# subcomplexes of the standard cubulation of Z^d


def lattice_id(point_: Sequence[int], dirs: int) -> str:
    coords = ".".join(str(c) for c in point_)
    if dirs == 0:
        return f"v{coords}"
    axes = "".join(AXES[i] for i in range(len(point_)) if dirs >> i & 1)
    kind = "vesc"[popcount(dirs)]
    return f"{kind}{coords}{axes}"


def lattice_cube(point_: Sequence[int], dirs: int) -> Cube:
    """The lattice cube at ``point_`` spanning the axes in ``dirs``.

    Own coordinate ``j`` of the cube is its ``j``-th spanned axis, so every
    face attaches by the identity on masks after compression.
    """
    d = len(point_)
    axes = [i for i in range(d) if dirs >> i & 1]
    k = len(axes)

    def at(m: int) -> tuple[int, ...]:
        p = list(point_)
        for j, ax in enumerate(axes):
            if m >> j & 1:
                p[ax] += 1
        return tuple(p)

    corners = tuple(lattice_id(at(m), 0) for m in range(1 << k))
    faces: dict[Pattern, FaceRef] = {}
    for fd, fb in face_patterns(k):
        sub_axes = 0
        for j, ax in enumerate(axes):
            if fd >> j & 1:
                sub_axes |= 1 << ax
        origin = at(fb)
        faces[(fd, fb)] = (lattice_id(origin, sub_axes), tuple(range(1 << popcount(fd))))
    return Cube(lattice_id(point_, dirs), k, corners, faces)


def lattice_complex(maximal: Iterable[tuple[Sequence[int], int]]) -> CubeComplex:
    """Face closure of lattice cubes given as ``(min corner, axis bitmask)``."""
    cells: dict[str, Cube] = {}
    stack = [lattice_cube(tuple(p), dirs) for p, dirs in maximal]
    while stack:
        c = stack.pop()
        if c.id in cells:
            continue
        cells[c.id] = c
        pt = _lattice_point(c)
        for (fd, fb), (fid, _) in c.faces.items():
            if fid not in cells:
                stack.append(_lattice_face(pt, c, fd, fb))
    return CubeComplex(cells.values())


def _lattice_point(c: Cube) -> tuple[int, ...]:
    v = c.corners[0][1:]
    return tuple(int(x) for x in v.split("."))


def _lattice_face(pt: tuple[int, ...], c: Cube, fd: int, fb: int) -> Cube:
    # recover the axes of c from its id suffix
    axes_str = c.id.lstrip("vesc0123456789.-")
    axes = [AXES.index(a) for a in axes_str]
    p = list(pt)
    sub = 0
    for j, ax in enumerate(axes):
        if fb >> j & 1:
            p[ax] += 1
        if fd >> j & 1:
            sub |= 1 << ax
    return lattice_cube(tuple(p), sub)


def grid(n: int, m: int) -> CubeComplex:
    """An ``n`` by ``m`` rectangle of unit squares."""
    return lattice_complex(((i, j), 0b11) for i in range(n) for j in range(m))


def cube3() -> CubeComplex:
    return lattice_complex([((0, 0, 0), 0b111)])


def single_square() -> CubeComplex:
    return grid(1, 1)


def missing_corner() -> CubeComplex:
    """Three squares around a vertex like the corner of a 3-cube, without the cube."""
    return lattice_complex([((0, 0, 0), 0b011), ((0, 0, 0), 0b101), ((0, 0, 0), 0b110)])


# ---------------------------------------------------------------------------
# products of graphs


def product(G: CubeComplex, H: CubeComplex) -> CubeComplex:
    """Cartesian product of two graphs (cells named ``(g,h)``)."""
    if G.dimension > 1 or H.dimension > 1:
        raise ValueError("product is implemented for graphs only")

    def name(a, b):
        return f"({a},{b})"

    cells = []
    for a, b in iproduct(G.cells, H.cells):
        ca, cb = G[a], H[b]
        k = ca.dim + cb.dim
        # own bit 0 = the G direction if present, next bit = the H direction
        def split(m, ca=ca, cb=cb):
            if ca.dim and cb.dim:
                return m & 1, m >> 1 & 1
            if ca.dim:
                return m & 1, 0
            return 0, m & 1

        corners = tuple(name(ca.corners[x], cb.corners[y]) for x, y in map(split, range(1 << k)))
        faces = {}
        for fd, fb in face_patterns(k):
            dx, dy = split(fd)
            bx, by = split(fb)
            fa = ca.faces[(dx, bx)]
            fbb = cb.faces[(dy, by)]
            sub_k = popcount(fd)
            own = []
            for m in face_corners((fd, fb)):
                x, y = split(m)
                ox = dict(zip(face_corners((dx, bx)), fa[1]))[x]
                oy = dict(zip(face_corners((dy, by)), fbb[1]))[y]
                if dx and dy:
                    own.append(ox | oy << 1)
                else:
                    own.append(ox if dx else oy)
            assert len(own) == 1 << sub_k
            faces[(fd, fb)] = (name(fa[0], fbb[0]), tuple(own))
        cells.append(Cube(name(a, b), k, corners, faces))
    return CubeComplex(cells)


def ball(X: CubeComplex, center: str, radius: int) -> CubeComplex:
    """Full subcomplex on the vertices within edge distance ``radius`` of ``center``."""
    adj = X.adjacency()
    dist = {center: 0}
    frontier = [center]
    for r in range(radius):
        nxt = []
        for v in frontier:
            for _, w in adj[v]:
                if w not in dist:
                    dist[w] = r + 1
                    nxt.append(w)
        frontier = nxt
    keep = [c.id for c in X if all(v in dist for v in c.corners)]
    return X.subcomplex(keep)
