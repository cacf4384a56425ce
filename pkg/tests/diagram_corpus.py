"""Generators for disc diagrams used by the diagram tests and the acceptance run.

Polyominoes over the torus are built with coordinates and a face trace of
the plane grid.  Everything else grows a disc by attaching polygons along
arcs of its outer boundary, which keeps the disc planar by construction.
"""

from __future__ import annotations

import random
from functools import lru_cache

from cubicalsc.complex_core.builders import torus
from cubicalsc.complex_core.cells import square_boundary
from cubicalsc.diagrams import ConeCell, Diagram, check_diagram, lift_cone
from cubicalsc.diagrams.model import inverse_path, lift_table, rotations_of
from cubicalsc.morphisms import identity_map
from cubicalsc.presentation import CubicalPresentation, check_cn, rose_presentation

DIRS = [(1, 0), (0, 1), (-1, 0), (0, -1)]  # counterclockwise


@lru_cache(maxsize=None)
def torus_presentations() -> tuple[CubicalPresentation, CubicalPresentation]:
    T = torus()
    return CubicalPresentation(T, ()), CubicalPresentation(T, (identity_map(T),))


def _vid(i, j):
    return f"v{i}.{j}"


def polyomino_cells(rng: random.Random, n: int) -> set[tuple[int, int]]:
    while True:
        cells = {(0, 0)}
        while len(cells) < n:
            i, j = rng.choice(sorted(cells))
            di, dj = rng.choice(DIRS)
            cells.add((i + di, j + dj))
        if _outer_walk(cells) is not None:
            return cells


def _grid_edges(cells):
    edges = {}
    for i, j in cells:
        edges[f"h{i}.{j}"] = ((i, j), (i + 1, j))
        edges[f"h{i}.{j + 1}"] = ((i, j + 1), (i + 1, j + 1))
        edges[f"w{i}.{j}"] = ((i, j), (i, j + 1))
        edges[f"w{i + 1}.{j}"] = ((i + 1, j), (i + 1, j + 1))
    return edges


def _outer_walk(cells):
    """Trace the faces of the plane grid graph; None unless exactly one face is not a cell."""
    edges = _grid_edges(cells)
    out: dict[tuple[int, int], dict[tuple[int, int], tuple[str, int]]] = {}
    for e, (u, v) in edges.items():
        out.setdefault(u, {})[(v[0] - u[0], v[1] - u[1])] = (e, 1)
        out.setdefault(v, {})[(u[0] - v[0], u[1] - v[1])] = (e, -1)
    used = set()
    faces = []
    for u in sorted(out):
        for d in sorted(out[u]):
            if (u, d) in used:
                continue
            face = []
            cu, cd = u, d
            while (cu, cd) not in used:
                used.add((cu, cd))
                face.append(out[cu][cd])
                v = (cu[0] + cd[0], cu[1] + cd[1])
                back = DIRS.index((-cd[0], -cd[1]))
                # first existing direction clockwise from the way back
                for t in range(1, 5):
                    nd = DIRS[(back - t) % 4]
                    if nd in out[v]:
                        break
                cu, cd = v, nd
            faces.append(face)
    non_cells = [f for f in faces if not (len(f) == 4 and _is_cell(f, edges, cells))]
    return non_cells[0] if len(non_cells) == 1 else None


def _is_cell(face, edges, cells):
    pts = set()
    area = 0
    for e, s in face:
        u, v = edges[e] if s > 0 else edges[e][::-1]
        area += u[0] * v[1] - v[0] * u[1]
        pts.update(edges[e])
    if area <= 0:
        return False
    lo = min(pts)
    return lo in cells and len(pts) == 4 and all(
        (lo[0] + a, lo[1] + b) in pts for a in (0, 1) for b in (0, 1))


def polyomino(cells: set[tuple[int, int]]) -> Diagram:
    p = torus_presentations()[0]
    edges = _grid_edges(cells)
    verts = sorted({_vid(*x) for uv in edges.values() for x in uv})
    E = {e: (_vid(*u), _vid(*v)) for e, (u, v) in edges.items()}
    lab = {e: ("a" if e[0] == "h" else "b", 1) for e in E}
    squares = {f"s{i}.{j}": ((f"h{i}.{j}", 1), (f"w{i + 1}.{j}", 1), (f"h{i}.{j + 1}", -1), (f"w{i}.{j}", -1))
               for i, j in cells}
    D = Diagram("disc", tuple(verts), E, squares, {}, {v: "v" for v in verts}, lab,
                {s: "s" for s in squares}, tuple(_outer_walk(cells)))
    return check_diagram(D, p)


class Builder:
    """Grows a disc by gluing polygons along arcs of the outer boundary."""

    def __init__(self, p: CubicalPresentation, D: Diagram | None = None, start_label: str | None = None):
        self.p = p
        self.n = 0
        if D is None:
            v = self.fresh("x")
            D = Diagram("disc", (v,), {}, {}, {}, {v: start_label or p.base.vertices[0]}, {}, {}, ())
        self.vertices = list(D.vertices)
        self.vlab = dict(D.vertex_labels)
        self.edges = dict(D.edges)
        self.elab = dict(D.edge_labels)
        self.squares = dict(D.squares)
        self.slab = dict(D.square_labels)
        self.cones = dict(D.cones)
        self.outer = list(D.outer)
        self.anchor = D.vertices[0]

    def fresh(self, stem: str) -> str:
        self.n += 1
        return f"{stem}_{self.n}"

    def tail(self, st):
        u, v = self.edges[st[0]]
        return u if st[1] > 0 else v

    def head(self, st):
        u, v = self.edges[st[0]]
        return v if st[1] > 0 else u

    def label(self, st):
        t, s = self.elab[st[0]]
        return t, s * st[1]

    def vertex_at(self, k: int) -> str:
        return self.tail(self.outer[k % len(self.outer)]) if self.outer else self.anchor

    def arc(self, k: int, length: int) -> list:
        n = len(self.outer)
        return [self.outer[(k + t) % n] for t in range(length)]

    def _path(self, a: str, b: str, labels) -> list:
        """New edges from a to b reading ``labels``; intermediate vertices are fresh."""
        X = self.p.base
        steps, cur = [], a
        for idx, (t, s) in enumerate(labels):
            u, w = X.ends(t)
            far = w if s > 0 else u
            nxt = b if idx == len(labels) - 1 else self.fresh("x")
            if nxt != b:
                self.vertices.append(nxt)
                self.vlab[nxt] = far
            e = self.fresh("e")
            if s > 0:
                self.edges[e] = (cur, nxt)
            else:
                self.edges[e] = (nxt, cur)
            self.elab[e] = (t, 1)
            steps.append((e, s))
            cur = nxt
        return steps

    def attach(self, k: int, length: int, completion_labels) -> tuple:
        """Glue a polygon along the arc of ``length`` at outer position ``k``.

        The new polygon reads the arc and then the inverse of the new path.
        Returns the polygon boundary (starting with the arc) and the new path.
        """
        n = len(self.outer)
        if n:
            k %= n
            self.outer = self.outer[k:] + self.outer[:k]
        a = self.vertex_at(0)
        arc = self.outer[:length]
        b = self.head(arc[-1]) if arc else a
        new = self._path(a, b, completion_labels)
        self.outer = new + self.outer[length:]
        return tuple(arc) + inverse_path(new), tuple(new)

    def attach_square(self, k: int, length: int, sq: str = "s") -> tuple | None:
        n = len(self.outer)
        if n:
            k %= n
        arc_labels = tuple(self.label(st) for st in self.arc(k, length)) if length else ()
        base = tuple(square_boundary(self.p.base[sq]))
        options = [r for r in rotations_of(base) + rotations_of(inverse_path(base)) if r[:length] == arc_labels]
        if not options:
            return None
        r = options[0]
        bnd, new = self.attach(k, length, [(t, s) for t, s in inverse_path(r[length:])])
        sid = self.fresh("s")
        self.squares[sid] = bnd
        self.slab[sid] = sq
        return sid, new

    def attach_cone(self, k: int, length: int, relator: int, y0: str, completion) -> str | None:
        """``completion`` maps (relator, end vertex, arc relator path) to relator steps closing the loop."""
        T = lift_table(self.p, relator)
        arc = self.arc(k, length) if length else []
        y, ypath = y0, []
        for st in arc:
            nxt = T.step.get((y, *self.label(st)))
            if nxt is None:
                return None
            ypath.append(nxt[:2])
            y = nxt[2]
        closing = completion(T, y, ypath)
        if closing is None:
            return None
        labels = []
        for e, s in inverse_path(closing):
            t, ts = T.phi.edge_image(e)
            labels.append((t, ts * s))
        bnd, _ = self.attach(k, length, labels)
        cid = self.fresh("C")
        self.cones[cid] = ConeCell(bnd, relator, y0)
        return cid

    def spur(self, k: int, label) -> None:
        if self.outer:
            k %= len(self.outer)
            self.outer = self.outer[k:] + self.outer[:k]
        a = self.vertex_at(0)
        X = self.p.base
        t, s = label
        u, w = X.ends(t)
        far = w if s > 0 else u
        x = self.fresh("x")
        self.vertices.append(x)
        self.vlab[x] = far
        e = self.fresh("e")
        self.edges[e] = (a, x) if s > 0 else (x, a)
        self.elab[e] = (t, 1)
        self.outer = [(e, s), (e, -s)] + self.outer

    def diagram(self) -> Diagram:
        D = Diagram("disc", tuple(self.vertices), dict(self.edges), dict(self.squares), dict(self.cones),
                    dict(self.vlab), dict(self.elab), dict(self.slab), tuple(self.outer))
        return check_diagram(D, self.p)


def cycle_completion(T, y, ypath):
    """Go on around a cycle relator in the direction of the last step (or forward if none)."""
    n = len(T.Y.edges)
    if len(ypath) >= n:
        return None
    out = []
    if ypath:
        prev = ypath[-1]
    else:
        prev = None
    cur = y
    for _ in range(n - len(ypath)):
        cands = []
        for (yy, t, s), (e, se, nxt) in T.step.items():
            if yy == cur and (prev is None or (e, se) != (prev[0], -prev[1])):
                cands.append(((e, se), nxt))
        cands.sort()
        if prev is None:
            cands = [c for c in cands if c[0][1] > 0] or cands
        (e, se), nxt = cands[0]
        out.append((e, se))
        prev = (e, se)
        cur = nxt
    return out


# ---------------------------------------------------------------------------
# planted pathologies (torus bases)


def _corner_positions(B: Builder) -> list[int]:
    """Outer positions k where outer[k], outer[k+1] are consecutive sides of one square."""
    n = len(B.outer)
    out = []
    for k in range(n):
        a, b = B.outer[k][0], B.outer[(k + 1) % n][0]
        if a == b:
            continue
        for sb in B.squares.values():
            es = [e for e, _ in sb]
            if any({es[j], es[(j + 1) % 4]} == {a, b} for j in range(4)):
                out.append(k)
                break
    return out


def plant_pillow(B: Builder, rng: random.Random) -> str:
    kind = rng.choice(["corner", "edge", "wedge"])
    n = len(B.outer)
    if kind == "corner" and n:
        ks = _corner_positions(B)
        if ks:
            k = rng.choice(ks)
            _, new = B.attach_square(k, 2)
            B.attach_square(0, 2)
            return "pillow"
    if kind == "edge" and n:
        k = rng.randrange(n)
        B.attach_square(k, 1)
        B.attach_square(0, 3)
        return "pillow"
    k = rng.randrange(n) if n else 0
    B.attach_square(k, 0)
    B.attach_square(0, 2)
    return "pillow"


def plant_cone_pair(B: Builder, rng: random.Random) -> str:
    """Two identity-relator cone-cells wedged at one vertex: a combinable pair."""
    n = len(B.outer)
    k = rng.randrange(n) if n else 0
    Y = B.p.relators[0].domain
    y = Y.vertices[0]
    word = lambda m: (lambda T, yy, path: [rng.choice(sorted(  # noqa: E731
        (e, s) for (v, _, _), (e, s, _) in T.step.items() if v == yy)) for _ in range(m)])
    B.attach_cone(k, 0, 0, y, word(rng.randint(1, 4)))
    B.attach_cone(0, 0, 0, y, word(rng.randint(1, 4)))
    return "combinable"


def plant_absorbable(B: Builder, rng: random.Random) -> str:
    """An identity-relator cone-cell glued to a boundary edge; its neighbouring squares are absorbable."""
    n = len(B.outer)
    k = rng.randrange(n)
    Y = B.p.relators[0].domain
    y = Y.vertices[0]
    m = rng.randint(1, 3)
    comp = lambda T, yy, path: [rng.choice(sorted(  # noqa: E731
        (e, s) for (v, _, _), (e, s, _) in T.step.items() if v == yy)) for _ in range(m)]
    B.attach_cone(k, 1, 0, y, comp)
    return "absorbable"


def planted_diagram(seed: int) -> tuple[Diagram, CubicalPresentation, list[str]]:
    rng = random.Random(seed)
    p0, p1 = torus_presentations()
    use_cones = seed % 2 == 1
    p = p1 if use_cones else p0
    D = polyomino(polyomino_cells(rng, rng.randint(1, 7)))
    B = Builder(p, D)
    planted = []
    for _ in range(rng.randint(1, 4)):
        r = rng.random()
        if use_cones and r < 0.3:
            planted.append(plant_cone_pair(B, rng))
        elif use_cones and r < 0.5:
            planted.append(plant_absorbable(B, rng))
        elif r < 0.85:
            planted.append(plant_pillow(B, rng))
        else:
            B.spur(rng.randrange(len(B.outer)), rng.choice([("a", 1), ("b", -1)]))
            planted.append("spur")
    return B.diagram(), p, planted


# ---------------------------------------------------------------------------
# C(9) rose presentations and cone-cell trees


def _random_reduced(rng, letters, n):
    alphabet = letters + letters.upper()
    while True:
        w = [rng.choice(alphabet)]
        while len(w) < n:
            c = rng.choice(alphabet)
            if c.swapcase() != w[-1]:
                w.append(c)
        if w[0].swapcase() != w[-1]:
            return "".join(w)


@lru_cache(maxsize=None)
def c9_presentations() -> tuple[tuple[CubicalPresentation, object], ...]:
    """A few rose presentations certified C(9), with their certificates."""
    rng = random.Random(9)
    out = []
    specs = [("abcd", 1, 10), ("abcd", 2, 10), ("abc", 1, 12)]
    for letters, count, length in specs:
        while True:
            words = [_random_reduced(rng, letters, length) for _ in range(count)]
            p = rose_presentation(letters, words)
            v = check_cn(p, 9)
            if v.status == "Certified":
                out.append((p, v))
                break
    return tuple(out)


def cone_tree(seed: int, p: CubicalPresentation) -> Diagram:
    rng = random.Random(seed)
    B = Builder(p)
    R = len(p.relators)

    def start_vertex(i):
        return rng.choice(p.relators[i].domain.vertices)

    B.attach_cone(0, 0, 0, start_vertex(0), cycle_completion)
    for _ in range(rng.randint(0, 5)):
        n = len(B.outer)
        k = rng.randrange(n)
        r = rng.random()
        if r < 0.2:
            B.spur(k, (rng.choice(p.base.edges), rng.choice((1, -1))))
            continue
        i = rng.randrange(R)
        if r < 0.4:
            B.attach_cone(k, 0, i, start_vertex(i), cycle_completion)
            continue
        # glue along one boundary edge at a relator position carrying its letter
        T = lift_table(p, i)
        lab = B.label(B.outer[k])
        starts = sorted(y for (y, t, s) in T.step if (t, s) == lab)
        if starts:
            B.attach_cone(k, 1, i, rng.choice(starts), cycle_completion)
    return B.diagram()


def dichotomy_suite(n: int = 100) -> list[tuple[Diagram, CubicalPresentation, object]]:
    pres = c9_presentations()
    P0 = torus_presentations()[0]
    cert0 = check_cn(P0, 9)
    out = []
    for k in range(n):
        if k % 4 == 3:
            rng = random.Random(1000 + k)
            B = Builder(P0, polyomino(polyomino_cells(rng, rng.randint(1, 9))))
            for _ in range(rng.randint(0, 2)):
                B.spur(rng.randrange(len(B.outer)), rng.choice([("a", 1), ("b", 1)]))
            out.append((B.diagram(), P0, cert0))
        else:
            p, cert = pres[k % len(pres)]
            out.append((cone_tree(2000 + k, p), p, cert))
    return out


def lift_ok(D: Diagram, p: CubicalPresentation) -> bool:
    return all(lift_cone(D, p, c) for c in D.cones)
