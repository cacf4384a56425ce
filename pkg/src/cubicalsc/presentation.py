"""Cubical presentations: cone- and wall-pieces, the piece bound, and C(n) certification."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .complex_core.cells import ComplexError, CubeComplex
from .complex_core.hyperplanes import carrier, hyperplanes
from .complex_core.links import check_npc
from .maps import INF, FiberComponent, RelatorNotGraph, fiber_product
from .morphisms import CombinatorialMap, check_local_isometry

Step = tuple[str, int]  # oriented edge: (edge id, +1 / -1)


class PresentationError(ComplexError):
    kind = "PresentationError"


class NotLocalIsometry(PresentationError):
    kind = "NotLocalIsometry"


class DisconnectedRelator(PresentationError):
    kind = "DisconnectedRelator"


class BaseNotNPC(PresentationError):
    kind = "NotNPC"


@dataclass(frozen=True, eq=False)
class CubicalPresentation:
    """Base complex ``X`` with relator local isometries ``Y_i -> X``."""

    base: CubeComplex
    relators: tuple[CombinatorialMap, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relators", tuple(self.relators))
        v = check_npc(self.base)
        if not v:
            raise BaseNotNPC(f"base is not non-positively curved at {v.vertex}", v.vertex)
        if not self.base.is_connected():
            raise PresentationError("base is not connected")
        for i, phi in enumerate(self.relators):
            if phi.codomain is not self.base and set(phi.codomain.cells) != set(self.base.cells):
                raise PresentationError(f"relator {i} does not map to the base", str(i))
            if not phi.domain.is_connected():
                raise DisconnectedRelator(f"relator {i} is not connected", str(i))
            w = check_local_isometry(phi)
            if not w:
                raise NotLocalIsometry(f"relator {i} is not a local isometry ({w.problem} at {w.vertex})", str(i))

    def require_graph_relators(self) -> None:
        for i, phi in enumerate(self.relators):
            if phi.domain.dimension > 1:
                raise RelatorNotGraph(f"relator {i} has dimension {phi.domain.dimension}", str(i))

    @cached_property
    def pieces(self) -> tuple["AbstractPiece", ...]:
        return tuple(cone_pieces(self)) + tuple(wall_pieces(self))

    @cached_property
    def _automata(self) -> dict[int, list["_PieceWalker"]]:
        out: dict[int, list[_PieceWalker]] = {i: [] for i in range(len(self.relators))}
        for P in self.pieces:
            out[P.relator].append(_PieceWalker(P))
        return out

    def piece_reach(self, i: int, steps: Sequence[Step], start: int = 0, classified_only: bool = False) -> int:
        """Length of the longest prefix of ``steps[start:]`` (read cyclically) that is a piece path in Y_i."""
        best = 0
        n = len(steps)
        for w in self._automata[i]:
            if classified_only and not w.piece.classified:
                continue
            best = max(best, w.reach(steps, start, n))
            if best >= n:
                return n
        return best


@dataclass(frozen=True, eq=False)
class AbstractPiece:
    kind: str
    relator: int
    partner: int | str
    source: FiberComponent
    edge_count: int
    classified: bool = True

    @property
    def immersion(self) -> CombinatorialMap:
        return self.source.left

    def has_cycle(self) -> bool:
        return self.source.has_cycle()

    def as_dict(self) -> dict:
        K = self.source.complex
        imm = self.immersion
        d = {"kind": self.kind, "relator": self.relator, "edge_count": self.edge_count,
             "classified": self.classified,
             "component": {"vertices": [imm(v) for v in K.vertices],
                           "edges": [f"{t}{'+' if s > 0 else '-'}" for t, s in map(imm.edge_image, K.edges)]}}
        if self.kind == "cone":
            d["relators"] = [self.relator, self.partner]
        else:
            d["hyperplane"] = self.partner
        return d


class _PieceWalker:
    """Lifts Y-paths into one abstract piece through its immersion."""

    def __init__(self, piece: AbstractPiece):
        self.piece = piece
        K = piece.source.complex
        f = piece.immersion
        self.over: dict[str, list[str]] = {}
        for v in K.vertices:
            self.over.setdefault(f(v), []).append(v)
        self.step: dict[tuple[str, Step], str] = {}
        for k in K.edges:
            t, s = f.edge_image(k)
            u, w = K.ends(k)
            self.step[(u, (t, s))] = w
            self.step[(w, (t, -s))] = u
        self.Y = f.codomain

    def reach(self, steps: Sequence[Step], start: int, cap: int) -> int:
        n = len(steps)
        e, s = steps[start % n]
        y = self.Y.ends(e)[0 if s > 0 else 1]
        best = 0
        for k in self.over.get(y, ()):
            length = 0
            while length < cap:
                nxt = self.step.get((k, steps[(start + length) % n]))
                if nxt is None:
                    break
                k = nxt
                length += 1
            best = max(best, length)
        return best


def cone_pieces(p: CubicalPresentation) -> list[AbstractPiece]:
    p.require_graph_relators()
    out = []
    for i, fi in enumerate(p.relators):
        for j, fj in enumerate(p.relators):
            fp = fiber_product(fi, fj, same_map=(i == j))
            for comp in fp.components:
                if i == j and (comp.diagonal or (comp.iso_left and comp.iso_right)):
                    continue
                if comp.edge_count == 0:
                    continue
                out.append(AbstractPiece("cone", i, j, comp, comp.edge_count))
    return out


@dataclass(frozen=True)
class WallReport:
    hyperplane: str
    local_isometry: bool


def wall_pieces(p: CubicalPresentation, report: list | None = None) -> list[AbstractPiece]:
    """Components of N(H) x_X Y_i avoiding the dual edges; kept but unclassified if N(H) is not immersed."""
    p.require_graph_relators()
    out = []
    if p.base.dimension < 2 or not p.relators:
        return out
    for H in hyperplanes(p.base):
        C = carrier(p.base, H)
        ok = C.local_isometry
        if report is not None:
            report.append(WallReport(H.id, ok))
        for i, fi in enumerate(p.relators):
            fp = fiber_product(fi, C.map)
            for comp in fp.components:
                if comp.edge_count == 0:
                    continue
                crossing = any(fp.right_of[c] in C.dual_edges for c in comp.complex.edges)
                if crossing and ok:
                    continue
                out.append(AbstractPiece("wall", i, H.id, comp, comp.edge_count, classified=ok))
    return out


@dataclass(frozen=True, eq=False)
class PieceBound:
    L: int | float
    per_piece: tuple[int, ...]
    unbounded_witness: AbstractPiece | None = None

    def as_dict(self) -> dict:
        return {"status": "Bounded" if self.L != INF else "Unbounded",
                "L": "inf" if self.L == INF else self.L, "per_piece": list(self.per_piece),
                "unbounded_witness": self.unbounded_witness.as_dict() if self.unbounded_witness else None}


def piece_bound(p: CubicalPresentation) -> PieceBound:
    counts = tuple(P.edge_count for P in p.pieces)
    for P in p.pieces:
        if P.has_cycle():
            return PieceBound(INF, counts, P)
    return PieceBound(max(counts, default=0), counts)


# ---------------------------------------------------------------------------
# closed paths in a graph


class BudgetExceeded(Exception):
    pass


def _canonical(cycle: tuple[Step, ...]) -> tuple[Step, ...]:
    inv = tuple((e, -s) for e, s in reversed(cycle))
    n = len(cycle)
    return min(min(c[k:] + c[:k] for k in range(n)) for c in (cycle, inv))


def reduced_cycles(Y: CubeComplex, max_len: int, limit: int = 200_000) -> list[tuple[Step, ...]]:
    """Cyclically reduced closed paths of length <= max_len, one per rotation/inversion class."""
    out: set[tuple[Step, ...]] = set()
    adj: dict[str, list[tuple[Step, str]]] = {v: [] for v in Y.vertices}
    for e in Y.edges:
        u, w = Y.ends(e)
        adj[u].append(((e, 1), w))
        adj[w].append(((e, -1), u))
    for v in adj:
        adj[v].sort()
    visited = 0
    for v in Y.vertices:
        stack: list[tuple[str, tuple[Step, ...]]] = [(v, ())]
        while stack:
            x, path = stack.pop()
            visited += 1
            if visited > limit:
                raise BudgetExceeded(max_len)
            if path and x == v:
                if path[0] != (path[-1][0], -path[-1][1]):
                    out.add(_canonical(path))
            if len(path) >= max_len:
                continue
            for st, y in adj[x]:
                if path and st == (path[-1][0], -path[-1][1]):
                    continue
                stack.append((y, path + (st,)))
    return sorted(out, key=lambda c: (len(c), c))


def cycle_piece_count(p: CubicalPresentation, i: int, cycle: Sequence[Step],
                      classified_only: bool = False) -> tuple[int | float, list[list[Step]]]:
    """Least number of pieces concatenating to the closed path, with a decomposition."""
    n = len(cycle)
    reach = [p.piece_reach(i, cycle, t, classified_only) for t in range(n)]
    if reach and min(reach) >= n:
        return 1, [list(cycle)]
    best: int | float = INF
    best_cut: list[list[Step]] = []
    for s in range(n):
        pos, parts = s, []
        while pos < s + n:
            r = min(reach[pos % n], s + n - pos)
            if r == 0:
                parts = None
                break
            parts.append([cycle[(pos + k) % n] for k in range(r)])
            pos += r
        if parts is not None and len(parts) < best:
            best, best_cut = len(parts), parts
    return best, best_cut


def _piece_forest(p: CubicalPresentation, i: int) -> bool:
    """True if the edges of Y_i covered by pieces span a forest."""
    Y = p.relators[i].domain
    covered = set()
    for P in p.pieces:
        if P.relator == i:
            covered |= {P.immersion(k) for k in P.source.complex.edges}
    parent = {v: v for v in Y.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in sorted(covered):
        a, b = (find(x) for x in Y.ends(e))
        if a == b:
            return False
        parent[a] = b
    return True


@dataclass(frozen=True)
class GirthResult:
    value: int | float | None  # None: indeterminate
    exact: bool
    cycle: tuple[Step, ...] = ()
    decomposition: tuple[tuple[Step, ...], ...] = ()
    budget_used: int = 0
    reason: str = ""

    def as_dict(self) -> dict:
        v = self.value
        return {"status": "Exact" if self.exact else "Indeterminate",
                "value": "inf" if v == INF else v, "budget_used": self.budget_used,
                "cycle": _fmt_path(self.cycle), "decomposition": [_fmt_path(d) for d in self.decomposition],
                "reason": self.reason}


def _fmt_path(path: Iterable[Step]) -> list[str]:
    return [f"{e}{'+' if s > 0 else '-'}" for e, s in path]


def min_piece_girth(p: CubicalPresentation, i: int, budget: int | None = None) -> GirthResult:
    p.require_graph_relators()
    pb = piece_bound(p)
    if pb.L == INF:
        return GirthResult(None, False, reason="piece bound is infinite")
    if _piece_forest(p, i):
        return GirthResult(INF, True, reason="pieces cover a forest")
    Y = p.relators[i].domain
    if budget is None:
        budget = len(Y.edges) + 8 * max(1, int(pb.L))
    try:
        cycles = reduced_cycles(Y, budget)
    except BudgetExceeded:
        return GirthResult(None, False, budget_used=budget, reason="enumeration limit reached")
    best: tuple = (INF, (), ())
    for c in cycles:
        cnt, dec = cycle_piece_count(p, i, c)
        if cnt < best[0]:
            best = (cnt, c, tuple(tuple(d) for d in dec))
    value, cyc, dec = best
    if value == INF:
        return GirthResult(None, False, budget_used=budget,
                           reason=f"no piece-decomposable cycle of length <= {budget}")
    exact = (value - 1) * pb.L <= budget
    return GirthResult(value, exact, cyc, dec, budget,
                       "" if exact else "budget too small to rule out fewer pieces")


@dataclass(frozen=True)
class CnVerdict:
    status: str  # Certified | Refuted | Indeterminate
    n: int
    budget_used: int = 0
    relator: int | None = None
    cycle: tuple[Step, ...] = ()
    decomposition: tuple[tuple[Step, ...], ...] = ()
    reason: str = ""
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = {"status": self.status, "n": self.n, "budget_used": self.budget_used}
        if self.status == "Refuted":
            d["witness"] = {"relator": self.relator, "cycle": _fmt_path(self.cycle),
                            "decomposition": [_fmt_path(x) for x in self.decomposition],
                            "piece_count": len(self.decomposition)}
        if self.reason:
            d["reason"] = self.reason
        d.update(self.extra)
        return d


def _cycle_in(K: CubeComplex, f: CombinatorialMap) -> tuple[Step, ...]:
    """Some reduced closed path in graph K, pushed forward along f."""
    parent: dict[str, tuple[str, Step] | None] = {}
    adj: dict[str, list[tuple[str, Step, str]]] = {v: [] for v in K.vertices}
    for e in K.edges:
        u, w = K.ends(e)
        adj[u].append((e, (e, 1), w))
        adj[w].append((e, (e, -1), u))
    for root in K.vertices:
        if root in parent:
            continue
        parent[root] = None
        used: set[str] = set()
        stack = [root]
        while stack:
            x = stack.pop()
            for e, st, y in sorted(adj[x]):
                if e in used:
                    continue
                used.add(e)
                if y in parent:
                    # tree path root->x, edge, then y->root
                    def up(z):
                        path = []
                        while parent[z] is not None:
                            pz, s = parent[z]
                            path.append(s)
                            z = pz
                        return path[::-1]

                    loop = up(x) + [st] + [(e2, -s2) for e2, s2 in reversed(up(y))]
                    # cancel the common tree prefix
                    while len(loop) > 1 and loop[0] == (loop[-1][0], -loop[-1][1]):
                        loop = loop[1:-1]
                    out = []
                    for e2, s2 in loop:
                        t, sign = f.edge_image(e2)
                        out.append((t, sign * s2))
                    return tuple(out)
                parent[y] = (x, st)
                stack.append(y)
    return ()


def check_cn(p: CubicalPresentation, n: int, budget: int | None = None) -> CnVerdict:
    """Decide C(n) exactly when the default budget (n-1)L is affordable."""
    p.require_graph_relators()
    if n <= 1 or not p.relators:
        return CnVerdict("Certified", n, reason="vacuous")
    pb = piece_bound(p)
    if pb.L == INF:
        P = pb.unbounded_witness
        cyc = _cycle_in(P.source.complex, P.immersion)
        status = "Refuted" if P.classified else "Indeterminate"
        return CnVerdict(status, n, 0, P.relator, cyc, (cyc,),
                         reason="a piece carries an essential cycle")
    if pb.L == 0:
        return CnVerdict("Certified", n, 0, reason="no pieces")
    need = (n - 1) * int(pb.L)
    used = need if budget is None else min(budget, need)
    soft = None
    best = None
    for i in range(len(p.relators)):
        if _piece_forest(p, i):
            continue
        try:
            cycles = reduced_cycles(p.relators[i].domain, used)
        except BudgetExceeded:
            return CnVerdict("Indeterminate", n, used, reason="enumeration limit reached")
        for c in cycles:
            cnt, dec = cycle_piece_count(p, i, c)
            if cnt >= n:
                continue
            hard, _ = cycle_piece_count(p, i, c, classified_only=True)
            key = (cnt, len(c), i, c)
            if hard < n:
                if best is None or key < best[0]:
                    best = (key, i, c, dec)
            elif soft is None:
                soft = (i, c)
    if best is not None:
        _, i, c, dec = best
        return CnVerdict("Refuted", n, used, i, c, tuple(tuple(d) for d in dec))
    if soft is not None:
        return CnVerdict("Indeterminate", n, used,
                         reason="only unclassified wall-pieces give fewer than n pieces")
    if used < need:
        return CnVerdict("Indeterminate", n, used, reason=f"budget {used} below the complete bound {need}")
    return CnVerdict("Certified", n, used)


# ---------------------------------------------------------------------------
# one-dimensional presentations from words


def word_steps(word: str) -> list[Step]:
    """``"abAB"`` -> [(a, +1), (b, +1), (a, -1), (b, -1)]; upper case is the inverse."""
    return [(ch.lower(), 1 if ch.islower() else -1) for ch in word]


def cycle_relator(base: CubeComplex, word: str, prefix: str = "r") -> CombinatorialMap:
    """The cycle graph reading ``word``, mapped into a rose ``base`` whose loops are the letters."""
    from .complex_core.builders import graph

    n = len(word)
    verts = [f"{prefix}{k}" for k in range(n)]
    edges = [(f"{prefix}e{k}", verts[k], verts[(k + 1) % n]) for k in range(n)]
    Y = graph(verts, edges)
    o = base.vertices[0]
    cells = {v: (o, (0,)) for v in verts}
    for k, (e, s) in enumerate(word_steps(word)):
        cells[edges[k][0]] = (e, (0, 1) if s > 0 else (1, 0))
    return CombinatorialMap(Y, base, cells)


def rose_presentation(letters: str, words: Sequence[str]) -> CubicalPresentation:
    from .complex_core.builders import rose

    X = rose(list(letters))
    return CubicalPresentation(X, tuple(cycle_relator(X, w, prefix=f"r{i}_") for i, w in enumerate(words)))
