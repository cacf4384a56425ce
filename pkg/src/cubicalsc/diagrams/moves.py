"""Complexity-reducing surgery on diagrams.

Every move is a cut-and-reglue: some faces are removed, pairs of oriented
edges are identified, and edges left with no face side on either side are
deleted.  The result is re-validated from scratch, so a move that would
leave the plane is simply not taken.  Boundary edges are always chosen as
representatives, which keeps the boundary path identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from ..complex_core.cells import format_oriented
from ..presentation import CubicalPresentation
from .features import (
    Pathology,
    _absorbable,
    _cancellable,
    _combinable,
    _inessential,
    pathologies,
)
from .model import (
    Complexity,
    ConeCell,
    ConeCellNotFound,
    Diagram,
    DiagramError,
    FillingRequired,
    MalformedDiagram,
    Step,
    check_diagram,
    inverse_path,
    lift_cone,
)


def _fresh(D: Diagram, stem: str, taken: set[str] | None = None) -> str:
    used = set(D.vertices) | set(D.edges) | set(D.squares) | set(D.cones) | (taken or set())
    k = 0
    while f"{stem}{k}" in used:
        k += 1
    return f"{stem}{k}"


def rebuild(D: Diagram, p: CubicalPresentation, *, drop: Iterable[str] = (),
            pairs: Sequence[tuple[Step, Step]] = (), cones: Mapping[str, ConeCell] | None = None,
            squares: Mapping[str, tuple[tuple[Step, ...], str]] | None = None,
            vertices: Mapping[str, str] | None = None,
            edges: Mapping[str, tuple[str, str, Step]] | None = None,
            kind: str | None = None, outer: tuple[Step, ...] | None = None,
            prefer: Callable[[str], tuple] | None = None, split: bool = False) -> Diagram | None:
    """Apply one surgery; returns None if the result is not a valid diagram.

    With ``split`` a vertex whose link falls apart into several cycles is
    replaced by one vertex per cycle.
    """
    drop = set(drop)
    E = dict(D.edges)
    elab = dict(D.edge_labels)
    vlab = dict(D.vertex_labels)
    verts = list(D.vertices)
    for v, lab in (vertices or {}).items():
        verts.append(v)
        vlab[v] = lab
    for e, (u, w, lab) in (edges or {}).items():
        E[e] = (u, w)
        elab[e] = lab
    sq = {s: b for s, b in D.squares.items() if s not in drop}
    slab = {s: D.square_labels[s] for s in sq}
    for s, (b, lab) in (squares or {}).items():
        sq[s] = b
        slab[s] = lab
    cn = {c: cc for c, cc in D.cones.items() if c not in drop}
    cn.update(cones or {})
    outer = D.outer if outer is None else outer
    kind = kind or D.kind

    outer_e = {e for e, _ in outer}
    outer_v = {E[e][0] for e in outer_e} | {E[e][1] for e in outer_e}
    ekey = prefer or (lambda e: (e not in outer_e, e))
    eparent: dict[str, tuple[str, int]] = {}
    vparent: dict[str, str] = {}

    def efind(e: str) -> tuple[str, int]:
        sign = 1
        while e in eparent:
            e, s = eparent[e]
            sign *= s
        return e, sign

    def vfind(v: str) -> str:
        while v in vparent:
            v = vparent[v]
        return v

    def vunion(a: str, b: str) -> None:
        a, b = vfind(a), vfind(b)
        if a == b:
            return
        keep, other = sorted((a, b), key=lambda v: (v not in outer_v, v))
        vparent[other] = keep

    def tail(st):
        u, w = E[st[0]]
        return u if st[1] > 0 else w

    def head(st):
        u, w = E[st[0]]
        return w if st[1] > 0 else u

    def label(st):
        t, s = elab[st[0]]
        return t, s * st[1]

    for a, b in pairs:
        if label(a) != label(b):
            return None
        ra, xa = efind(a[0])
        rb, xb = efind(b[0])
        sa, sb = a[1] * xa, b[1] * xb
        vunion(tail(a), tail(b))
        vunion(head(a), head(b))
        if ra == rb:
            if sa != sb:
                return None
            continue
        keep, other = (ra, rb) if ekey(ra) <= ekey(rb) else (rb, ra)
        eparent[other] = (keep, sa * sb)

    def mapstep(st: Step) -> Step:
        r, x = efind(st[0])
        return r, st[1] * x

    sq = {s: tuple(map(mapstep, b)) for s, b in sq.items()}
    cn = {c: ConeCell(tuple(map(mapstep, cc.boundary)), cc.relator, cc.basepoint) for c, cc in cn.items()}
    outer = tuple(map(mapstep, outer))
    used = {e for b in sq.values() for e, _ in b} | {e for cc in cn.values() for e, _ in cc.boundary}
    used |= {e for e, _ in outer}
    new_edges = {e: (vfind(E[e][0]), vfind(E[e][1])) for e in sorted(used)}
    vlab = {vfind(v): vlab[v] for v in verts} | vlab
    if split:
        polys = list(sq.values()) + [cc.boundary for cc in cn.values()] + ([outer] if outer else [])
        _split_pinched(new_edges, polys, vlab)
    new_verts = {v for uv in new_edges.values() for v in uv}
    if not new_verts:
        anchor = sorted(verts, key=lambda v: (v not in outer_v, v))[0]
        new_verts = {vfind(anchor)}
    out = Diagram(kind, tuple(sorted(new_verts)),
                  new_edges, sq, cn, {v: vlab[v] for v in new_verts}, {e: elab[e] for e in new_edges},
                  slab, outer)
    try:
        return check_diagram(out, p)
    except (DiagramError, KeyError):
        return None


def _split_pinched(E: dict[str, tuple[str, str]], polys, vlab: dict[str, str]) -> None:
    nbrs: dict[tuple[str, int], list[tuple[str, int]]] = {}
    for b in polys:
        n = len(b)
        for k in range(n):
            a, c = b[k], b[(k + 1) % n]
            h_in, h_out = (a[0], 1 if a[1] > 0 else 0), (c[0], 0 if c[1] > 0 else 1)
            nbrs.setdefault(h_in, []).append(h_out)
            nbrs.setdefault(h_out, []).append(h_in)
    seen: set = set()
    taken = set(vlab)
    for h in sorted(nbrs):
        if h in seen:
            continue
        comp, todo = [], [h]
        seen.add(h)
        while todo:
            x = todo.pop()
            comp.append(x)
            for y in nbrs[x]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        v = E[h[0]][h[1]]
        if ("claimed", v) not in taken:
            taken.add(("claimed", v))
            continue
        k = 1
        while f"{v}'{k}" in taken:
            k += 1
        w = f"{v}'{k}"
        taken.add(w)
        vlab[w] = vlab[v]
        for e, end in comp:
            ends = list(E[e])
            ends[end] = w
            E[e] = tuple(ends)


# ---------------------------------------------------------------------------
# the moves


def cancel_squares(D: Diagram, p: CubicalPresentation, s1: str, s2: str, alignment) -> Diagram | None:
    r1, r2, k = alignment
    return rebuild(D, p, drop=(s1, s2), pairs=[(r1[j], r2[j]) for j in range(k, 4)])


def absorb_square(D: Diagram, p: CubicalPresentation, c: str, s: str, i: int, k: int, v) -> Diagram | None:
    cc = D.cones[c]
    _, yv = lift_cone(D, p, c)
    b = cc.boundary[i:] + cc.boundary[:i]
    new = ConeCell(inverse_path(v[k:]) + b[k:], cc.relator, yv[i])
    return rebuild(D, p, drop=(s,), cones={c: new})


def combine_cones(D: Diagram, p: CubicalPresentation, a: str, b: str, i: int, j: int) -> Diagram | None:
    """Merge two cone-cells of one relator whose lifts agree at a common vertex.

    If they share a common boundary path the merge is along that path;
    otherwise the two boundaries are joined at the vertex.
    """
    ca, cb = D.cones[a], D.cones[b]
    na, nb = len(ca.boundary), len(cb.boundary)
    _, yv = lift_cone(D, p, a)
    inv_b = {st: k for k, st in enumerate(inverse_path(cb.boundary))}
    runs = []
    for s0 in range(na):
        if ca.boundary[s0] not in inv_b or ca.boundary[s0 - 1] in inv_b and na > 1:
            continue
        k = 0
        while k < na and ca.boundary[(s0 + k) % na] in inv_b:
            k += 1
        runs.append((k, s0))
    for k, s0 in sorted(runs, reverse=True):
        if k >= na:
            continue
        run = [ca.boundary[(s0 + t) % na] for t in range(k)]
        # position in cb of the step inverse to the last run step
        jb = (nb - 1 - inv_b[run[-1]])
        bb = cb.boundary[jb:] + cb.boundary[:jb]
        if tuple(bb[:k]) != inverse_path(run):
            continue
        rest_a = tuple(ca.boundary[(s0 + k + t) % na] for t in range(na - k))
        merged = ConeCell(rest_a + tuple(bb[k:]), ca.relator, yv[(s0 + k) % na])
        out = rebuild(D, p, drop=(b,), cones={a: merged})
        if out is not None:
            return out
    ba = ca.boundary[i:] + ca.boundary[:i]
    bb = cb.boundary[j:] + cb.boundary[:j]
    for path in (bb, inverse_path(bb)):
        for split in (False, True):
            out = rebuild(D, p, drop=(b,), cones={a: ConeCell(ba + path, ca.relator, yv[i])}, split=split)
            if out is not None:
                return out
    return None


def fold_cone(D: Diagram, p: CubicalPresentation, c: str) -> Diagram | None:
    """Replace a cone-cell whose relator path freely reduces by the tree it folds to."""
    ys, _ = lift_cone(D, p, c)
    bnd = D.cones[c].boundary
    stack: list[int] = []
    pairs = []
    for j, (e, s) in enumerate(ys):
        if stack and ys[stack[-1]] == (e, -s):
            i = stack.pop()
            pairs.append((bnd[i], (bnd[j][0], -bnd[j][1])))
        else:
            stack.append(j)
    if stack:
        return None
    return rebuild(D, p, drop=(c,), pairs=pairs)


def fill_cone(D: Diagram, p: CubicalPresentation, c: str, filling: Diagram) -> Diagram | None:
    """Replace a cone-cell by a disc diagram with the same boundary word."""
    cc = D.cones[c]
    if filling.kind != "disc" or len(filling.outer) != len(cc.boundary):
        return None
    if filling.boundary_word() != tuple(D.label(st) for st in cc.boundary):
        return None
    pre = f"{c}/"
    ren = lambda x: pre + x  # noqa: E731
    mv = lambda st: (ren(st[0]), st[1])  # noqa: E731
    verts = {ren(v): filling.vertex_labels[v] for v in filling.vertices}
    edges = {ren(e): (ren(u), ren(w), filling.edge_labels[e]) for e, (u, w) in filling.edges.items()}
    squares = {ren(s): (tuple(map(mv, b)), filling.square_labels[s]) for s, b in filling.squares.items()}
    cones = {ren(k): ConeCell(tuple(map(mv, x.boundary)), x.relator, x.basepoint) for k, x in filling.cones.items()}
    outer_e = D.outer_edges()
    pairs = [(cc.boundary[k], mv(filling.outer[k])) for k in range(len(cc.boundary))]
    return rebuild(D, p, drop=(c,), pairs=pairs, vertices=verts, edges=edges, squares=squares, cones=cones,
                   prefer=lambda e: (e not in outer_e, e.startswith(pre), e))


def _step_from(D: Diagram, e: str, tail: str) -> Step:
    return (e, 1) if D.edges[e][0] == tail else (e, -1)


def hexagon_move(D: Diagram, p: CubicalPresentation, v: str) -> Diagram | None:
    """Push three squares around an interior vertex of degree 3 across the 3-cube they span."""
    X = p.base
    if v in {D.tail(st) for st in D.outer} or D.degree(v) != 3:
        return None
    rot = D.rotation.get(v, ())
    es = [e for e, _ in rot]
    if len(set(es)) != 3:
        return None
    around: dict[frozenset, tuple[str, list[Step]]] = {}
    for s, b in D.squares.items():
        for r in range(4):
            w = b[r:] + b[:r]
            if D.tail(w[0]) == v and w[0][0] in es and w[3][0] in es:
                around[frozenset((w[0][0], w[3][0]))] = (s, list(w))
                break
    if len(around) != 3 or len(D.faces()) < 3:
        return None
    if {x[0] for x in around.values()} & set(D.cones):
        return None
    u = {e: D.head(_step_from(D, e, v)) for e in es}
    x0 = D.vertex_labels[v]
    ends = {e: D.label(_step_from(D, e, v)) for e in es}  # base edge leaving x0
    for q in X.cubes3:
        Q = X[q]
        for m0 in range(8):
            if Q.faces[(0, m0)][0] != x0:
                continue
            dirs = {}
            for e in es:
                t, s = ends[e]
                for d in range(3):
                    qe, end = Q.edge_at(m0, d)
                    if qe == t and (end == 0) == (s > 0) and d not in dirs.values():
                        dirs[e] = d
                        break
            if len(dirs) != 3:
                continue
            ok = True
            for pair, (s, _) in around.items():
                a, b = sorted(pair)
                bits = (1 << dirs[a]) | (1 << dirs[b])
                if Q.faces[(bits, m0 & ~bits)][0] != D.square_labels[s]:
                    ok = False
            if not ok:
                continue
            return _hexagon_apply(D, p, v, Q, m0, dirs, around, u)
    return None


def _hexagon_apply(D, p, v, Q, m0, dirs, around, u) -> Diagram | None:
    es = sorted(dirs)
    far = {}
    side = {}
    for pair, (s, w) in around.items():
        far[pair] = D.head(w[1])
        # w: v -> u_a -> far -> u_b -> v
        a, b = w[0][0], w[3][0]
        side[(a, pair)] = w[1]            # u_a -> far
        side[(b, pair)] = (w[2][0], -w[2][1])  # u_b -> far
    top = m0 ^ 7
    taken: set[str] = set()
    vp = _fresh(D, "hx", taken)
    taken.add(vp)
    new_edges = {}
    f = {}
    for k in es:
        pair = frozenset(e for e in es if e != k)
        qe, end = Q.edge_at(top, dirs[k])
        eid = _fresh(D, "hx", taken)
        taken.add(eid)
        new_edges[eid] = (vp, far[pair], (qe, 1 if end == 0 else -1))
        f[k] = eid
    new_sq = {}
    for k in es:
        i, j = [e for e in es if e != k]
        pik, pkj = frozenset((i, k)), frozenset((k, j))
        to_ik = side[(k, pik)]        # u_k -> far_ik
        to_kj = side[(k, pkj)]        # u_k -> far_kj
        b = ((f[j], 1), (to_ik[0], -to_ik[1]), to_kj, (f[i], -1))
        bits = (1 << dirs[i]) | (1 << dirs[j])
        lab = Q.faces[(bits, (m0 ^ (1 << dirs[k])) & ~bits)][0]
        sid = _fresh(D, "hx", taken)
        taken.add(sid)
        new_sq[sid] = (b, lab)
    return rebuild(D, p, drop=[s for s, _ in around.values()], vertices={vp: Q.faces[(0, top)][0]},
                   edges=new_edges, squares=new_sq)


# ---------------------------------------------------------------------------
# reduction driver


@dataclass(frozen=True)
class TraceEntry:
    move: str
    cells: tuple[str, ...]
    before: Complexity
    after: Complexity
    hexagons: int = 0

    def as_dict(self) -> dict:
        d = {"move": self.move, "cells": list(self.cells), "before": list(self.before), "after": list(self.after)}
        if self.hexagons:
            d["hexagon_moves"] = self.hexagons
        return d


@dataclass(frozen=True)
class ReduceResult:
    diagram: Diagram
    trace: tuple[TraceEntry, ...]
    undischarged: tuple[Pathology, ...]
    initial: Complexity
    move_bound: int

    @property
    def status(self) -> str:
        return "Reduced" if not self.undischarged else "Undischarged"

    def as_dict(self) -> dict:
        return {"status": self.status, "initial_complexity": list(self.initial),
                "final_complexity": list(self.diagram.complexity), "move_bound": self.move_bound,
                "trace": [t.as_dict() for t in self.trace],
                "undischarged": [u.as_dict() for u in self.undischarged],
                "diagram": self.diagram.as_dict()}


def _reducing_moves(D: Diagram, p: CubicalPresentation, fillings: Mapping[str, Diagram]):
    """Candidate moves in priority order, each as (name, cells, thunk)."""
    for path, (a, b, i, j) in _combinable(D, p):
        yield "combine", path.cells, lambda a=a, b=b, i=i, j=j: combine_cones(D, p, a, b, i, j)
    for path in _inessential(D, p):
        c = path.cells[0]
        if path.detail["filling"] == "tree":
            yield "fold", path.cells, lambda c=c: fold_cone(D, p, c)
        elif c in fillings:
            yield "fill", path.cells, lambda c=c: fill_cone(D, p, c, fillings[c])
    for path, (c, s, i, k, v) in _absorbable(D, p):
        yield "absorb", path.cells, lambda c=c, s=s, i=i, k=k, v=v: absorb_square(D, p, c, s, i, k, v)
    for path, al in _cancellable(D):
        s1, s2 = path.cells
        yield "cancel", path.cells, lambda s1=s1, s2=s2, al=al: cancel_squares(D, p, s1, s2, al)


def _first_reduction(D: Diagram, p: CubicalPresentation, fillings) -> tuple[str, tuple, Diagram] | None:
    for name, cells, thunk in _reducing_moves(D, p, fillings):
        new = thunk()
        if new is not None and new.complexity < D.complexity:
            return name, cells, new
    return None


def _hexagon_search(D: Diagram, p: CubicalPresentation, fillings, depth: int, cap: int = 200):
    """Breadth-first over hexagon moves until some reducing move opens up."""
    if not p.base.cubes3 or depth <= 0:
        return None
    frontier = [(D, 0, None)]
    seen = 0
    while frontier:
        nxt = []
        for cur, n, last in frontier:
            for v in sorted(cur.vertices):
                if v == last:
                    continue
                moved = hexagon_move(cur, p, v)
                seen += 1
                if moved is None:
                    continue
                red = _first_reduction(moved, p, fillings)
                if red is not None:
                    return red, n + 1
                if n + 1 < depth:
                    created = sorted(set(moved.vertices) - set(cur.vertices))
                    nxt.append((moved, n + 1, created[0] if created else None))
                if seen > cap:
                    return None
        frontier = nxt
    return None


def reduce_diagram(D: Diagram, p: CubicalPresentation, fillings: Mapping[str, Diagram] | None = None,
                   strict: bool = False, hexagon_depth: int = 3) -> ReduceResult:
    """Apply complexity-reducing moves until none applies.

    Pathologies that no move removes are reported as undischarged.  With
    ``strict`` an internal cone-cell that needs a square filling which was
    not supplied raises FillingRequired.
    """
    fillings = dict(fillings or {})
    start = D.complexity
    extra = sum(len(f.squares) for f in fillings.values())
    bound = start.cone_cells + start.squares + extra
    trace: list[TraceEntry] = []
    cur = D
    while len(trace) <= bound:
        red = _first_reduction(cur, p, fillings)
        hexes = 0
        if red is None:
            found = _hexagon_search(cur, p, fillings, hexagon_depth)
            if found is None:
                break
            red, hexes = found
        name, cells, new = red
        trace.append(TraceEntry(name, tuple(cells), cur.complexity, new.complexity, hexes))
        cur = new
    left = tuple(pathologies(cur, p))
    if strict:
        for x in left:
            if x.kind == "inessential_cone" and x.detail.get("filling") == "squares":
                raise FillingRequired(f"cone-cell {x.cells[0]} needs a square filling", x.cells[0])
    return ReduceResult(cur, tuple(trace), left, start, bound)


# ---------------------------------------------------------------------------
# spheres


def puncture(S: Diagram, p: CubicalPresentation, c: str) -> Diagram:
    """Remove a cone-cell from a spherical diagram; its boundary becomes the disc boundary."""
    if S.kind != "sphere":
        raise MalformedDiagram("puncture needs a spherical diagram")
    if c not in S.cones:
        raise ConeCellNotFound(f"no cone-cell {c!r}", c)
    out = Diagram("disc", S.vertices, S.edges, S.squares, {k: v for k, v in S.cones.items() if k != c},
                  S.vertex_labels, S.edge_labels, S.square_labels, inverse_path(S.cones[c].boundary))
    return check_diagram(out, p)


def cap(D: Diagram, p: CubicalPresentation, c: str, relator: int, basepoint: str) -> Diagram:
    """Close a disc with a cone-cell along its boundary."""
    if D.kind != "disc":
        raise MalformedDiagram("cap needs a disc diagram")
    cones = dict(D.cones)
    cones[c] = ConeCell(inverse_path(D.outer), relator, basepoint)
    out = Diagram("sphere", D.vertices, D.edges, D.squares, cones, D.vertex_labels, D.edge_labels,
                  D.square_labels, ())
    return check_diagram(out, p)


def boundary_signature(D: Diagram) -> tuple[str, ...]:
    """The boundary path in the base, read from the outer basepoint."""
    return tuple(format_oriented(*D.label(st)) for st in D.outer)
