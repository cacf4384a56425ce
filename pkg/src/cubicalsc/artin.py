"""Artin-group cubical presentations over a rose, with dihedral relator balls.

Vertices of a dihedral relator ball are group elements in Garside left normal
form ``D^k s_1 ... s_r``: each ``s_i`` is a proper positive alternating word
and consecutive factors are left-weighted.  The normal form makes vertex
identification exact, which the breadth-first ball construction needs.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .complex_core.builders import graph, rose
from .complex_core.cells import ComplexError, CubeComplex
from .morphisms import CombinatorialMap
from .presentation import CnVerdict

__all__ = [
    "ArtinProfile", "DihedralArtin", "DihedralBall", "LabeledGraph", "LabeledGraphError",
    "NotFoundWithin", "ProfileNotVerified", "RadiusTooLargeForBudget", "artin_piece_profile",
    "build_rose", "certify_artin_cn", "dihedral_ball", "girth_dihedral", "letter_shift_preserves",
    "syllable_girth",
]

INF = math.inf
GIRTH_NOTE = ("the stated bound 'girth >= 5' is read as a bound on labels: essential cycles have "
              "length at least 2m >= 10, which is what gives fewer than 10 pieces no room")


class LabeledGraphError(ComplexError):
    kind = "LabeledGraphError"


class RadiusTooLargeForBudget(Exception):
    def __init__(self, m: int, radius: int, budget: int):
        super().__init__(f"ball of radius {radius} for m={m} exceeds {budget} vertices")
        self.m, self.radius, self.budget = m, radius, budget


class ProfileNotVerified(Exception):
    pass


@dataclass(frozen=True)
class NotFoundWithin:
    radius: int

    def as_dict(self) -> dict:
        return {"status": "NotFoundWithin", "radius": self.radius}


def _label(m) -> int | float:
    if m in ("inf", "∞", None) or m == INF:
        return INF
    if isinstance(m, bool) or not isinstance(m, int):
        raise LabeledGraphError(f"label {m!r} is not an integer or 'inf'")
    if m < 2:
        raise LabeledGraphError(f"label {m} is below 2")
    return m


@dataclass(frozen=True)
class LabeledGraph:
    """Simplicial graph with edge labels m >= 2 or infinity."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, int | float], ...] = ()

    def __post_init__(self):
        verts = tuple(self.vertices)
        if len(set(verts)) != len(verts):
            raise LabeledGraphError("repeated vertex")
        seen = set()
        edges = []
        for u, v, m in self.edges:
            if u not in verts or v not in verts:
                raise LabeledGraphError(f"edge {u}-{v} has an unknown end", f"{u}-{v}")
            if u == v:
                raise LabeledGraphError(f"loop at {u}", u)
            key = frozenset((u, v))
            if key in seen:
                raise LabeledGraphError(f"repeated edge {u}-{v}", f"{u}-{v}")
            seen.add(key)
            a, b = sorted((u, v), key=verts.index)
            edges.append((a, b, _label(m)))
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", tuple(edges))

    @classmethod
    def from_dict(cls, raw: dict) -> "LabeledGraph":
        try:
            return cls(tuple(raw["vertices"]), tuple((e["u"], e["v"], e["m"]) for e in raw.get("edges", ())))
        except (KeyError, TypeError) as exc:
            raise LabeledGraphError(f"malformed labeled graph: {exc}") from None

    def finite_edges(self) -> list[tuple[str, str, int]]:
        return [(u, v, m) for u, v, m in self.edges if m != INF]

    def as_dict(self) -> dict:
        return {"vertices": list(self.vertices),
                "edges": [{"u": u, "v": v, "m": "inf" if m == INF else m} for u, v, m in self.edges]}


def build_rose(G: LabeledGraph) -> CubeComplex:
    return rose(list(G.vertices))


# ---------------------------------------------------------------------------
# dihedral Artin groups


Simple = tuple[int, int]  # (first letter 0/1, length)
Element = tuple[int, tuple[Simple, ...]]


class DihedralArtin:
    """``<x0, x1 | x0 x1 x0 ... = x1 x0 x1 ...>`` with ``m`` letters per side."""

    def __init__(self, m: int):
        if not isinstance(m, int) or m < 2:
            raise ValueError("m must be an integer >= 2")
        self.m = m
        self.identity: Element = (0, ())

    def _last(self, s: Simple) -> int:
        f, n = s
        return f if n % 2 else 1 - f

    def _tau(self, s: Simple) -> Simple:
        return (1 - s[0], s[1]) if self.m % 2 else s

    def _pair(self, a: Simple, b: Simple) -> tuple[Simple, Simple]:
        """Left-weighted form of the product of two simples (length m means D)."""
        m = self.m
        if b[1] == 0 or a[1] == m:
            return a, b
        if b[1] == m:
            return (0, m), self._tau(a)
        if a[1] == 0:
            return b, (0, 0)
        if self._last(a) == b[0]:
            return a, b
        t = min(b[1], m - a[1])
        rest = (b[0] if t % 2 == 0 else 1 - b[0], b[1] - t)
        return (a[0], a[1] + t), rest

    def times_simple(self, g: Element, s: Simple) -> Element:
        k, ss = g
        carry = s
        tail: list[Simple] = []
        for cur in reversed(ss):
            carry, v = self._pair(cur, carry)
            tail.append(v)
        out = [carry] + tail[::-1]
        while out and out[0][1] == self.m:
            k += 1
            out.pop(0)
        out = [x for x in out if x[1]]
        assert all(x[1] < self.m for x in out)
        return k, tuple(out)

    def times(self, g: Element, letter: int, sign: int) -> Element:
        if sign > 0:
            return self.times_simple(g, (letter, 1))
        # x^-1 = D^-1 w with w x = D
        m = self.m
        w_last = 1 - letter
        w = ((w_last if (m - 1) % 2 else 1 - w_last), m - 1)
        k, ss = g
        return self.times_simple((k - 1, tuple(self._tau(s) for s in ss)), w)

    def from_word(self, word: Iterable[tuple[int, int]]) -> Element:
        g = self.identity
        for letter, sign in word:
            g = self.times(g, letter, sign)
        return g

    def word(self, g: Element) -> list[tuple[int, int]]:
        """A word for ``g``: the normal form written out, D^k first."""
        k, ss = g
        delta = [((0 if j % 2 == 0 else 1), 1) for j in range(self.m)]
        out: list[tuple[int, int]] = []
        if k >= 0:
            out += delta * k
        else:
            inv = [(x, -1) for x, _ in reversed(delta)]
            out += inv * (-k)
        for f, n in ss:
            out += [((f + j) % 2, 1) for j in range(n)]
        return out

    def name(self, g: Element, letters: Sequence[str] = ("a", "b")) -> str:
        k, ss = g
        parts = [f"D^{k}"] if k else []
        parts += ["".join(letters[(f + j) % 2] for j in range(n)) for f, n in ss]
        return ".".join(parts) or "1"

    def relator(self) -> list[tuple[int, int]]:
        """``x0 x1 ... (m letters)`` followed by the inverse of ``x1 x0 ...``."""
        left = [(j % 2, 1) for j in range(self.m)]
        right = [((j + 1) % 2, 1) for j in range(self.m)]
        return left + [(x, -1) for x, _ in reversed(right)]


# ---------------------------------------------------------------------------
# balls of the Cayley graph


@dataclass(frozen=True, eq=False)
class DihedralBall:
    m: int
    radius: int
    letters: tuple[str, str]
    names: tuple[str, ...]                      # vertex names, index = vertex number
    distance: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]     # (tail, head, letter) with head = tail * letter
    frontier: frozenset[int] = field(default_factory=frozenset)

    def degrees(self) -> list[int]:
        deg = [0] * len(self.names)
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def interior_regular(self) -> bool:
        return all(d == 4 for d, r in zip(self.degrees(), self.distance) if r < self.radius)

    def edge_id(self, k: int) -> str:
        u, _, x = self.edges[k]
        return f"{self.names[u]}|{self.letters[x]}"

    def complex(self) -> CubeComplex:
        return graph(self.names, [(self.edge_id(k), self.names[u], self.names[v])
                                  for k, (u, v, _) in enumerate(self.edges)])

    def covering(self, base: CubeComplex | None = None) -> CombinatorialMap:
        """The ball mapped to the rose on its two letters."""
        X = base if base is not None else rose(list(self.letters))
        o = X.vertices[0]
        cells = {v: (o, (0,)) for v in self.names}
        for k, (_, _, x) in enumerate(self.edges):
            cells[self.edge_id(k)] = (self.letters[x], (0, 1))
        return CombinatorialMap(self.complex(), X, cells)

    def as_dict(self) -> dict:
        return {"status": "OK", "m": self.m, "radius": self.radius, "letters": list(self.letters),
                "vertices": len(self.names), "edges": len(self.edges), "frontier": len(self.frontier),
                "interior_4_regular": self.interior_regular()}


def dihedral_ball(m: int, R: int, letters: Sequence[str] = ("a", "b"),
                  max_vertices: int = 200_000) -> DihedralBall:
    if not isinstance(m, int) or m < 2:
        raise ValueError("m must be a finite integer >= 2")
    if R < 1:
        raise ValueError("radius must be at least 1")
    grp = DihedralArtin(m)
    index = {grp.identity: 0}
    elems = [grp.identity]
    dist = [0]
    edges: set[tuple[int, int, int]] = set()
    queue = deque([0])
    while queue:
        i = queue.popleft()
        if dist[i] == R:
            continue
        g = elems[i]
        for x in (0, 1):
            for sign in (1, -1):
                h = grp.times(g, x, sign)
                j = index.get(h)
                if j is None:
                    if len(elems) >= max_vertices:
                        raise RadiusTooLargeForBudget(m, R, max_vertices)
                    j = len(elems)
                    index[h] = j
                    elems.append(h)
                    dist.append(dist[i] + 1)
                    queue.append(j)
                edges.add((i, j, x) if sign > 0 else (j, i, x))
    names = tuple(grp.name(g, letters) for g in elems)
    return DihedralBall(m, R, (letters[0], letters[1]), names, tuple(dist), tuple(sorted(edges)),
                        frozenset(i for i, d in enumerate(dist) if d == R))


def _girth(adj: list[list[int]], limit: float = INF) -> tuple[float, int, int, list[int], list[int]]:
    """Shortest cycle in a simple graph; returns (length, root, closing pair, parents...)."""
    best = limit
    found = None
    n = len(adj)
    for r in range(n):
        depth = [-1] * n
        parent = [-1] * n
        depth[r] = 0
        q = deque([r])
        while q:
            u = q.popleft()
            if 2 * depth[u] + 1 >= best:
                break
            for w in adj[u]:
                if depth[w] < 0:
                    depth[w] = depth[u] + 1
                    parent[w] = u
                    q.append(w)
                elif w != parent[u]:
                    c = depth[u] + depth[w] + 1
                    if c < best:
                        best = c
                        found = (r, u, w, parent[:])
    if found is None:
        return INF, -1, -1, [], []
    r, u, w, parent = found

    def up(z):
        out = [z]
        while parent[z] >= 0:
            z = parent[z]
            out.append(z)
        return out

    return best, u, w, up(u), up(w)


def girth_dihedral(m: int, R: int) -> int | NotFoundWithin:
    """Length of the shortest cycle inside the radius-R ball, found by breadth-first search."""
    ball = dihedral_ball(m, R)
    adj: list[list[int]] = [[] for _ in ball.names]
    for u, v, _ in ball.edges:
        adj[u].append(v)
        adj[v].append(u)
    g = _girth(adj)[0]
    return NotFoundWithin(R) if g == INF else int(g)


def syllable_girth(ball: DihedralBall) -> tuple[int | float, list[int]]:
    """Fewest single-letter runs on a cycle in the ball, with the cycle's vertices.

    Runs are counted on the incidence graph between vertices and maximal
    letter-line segments; a cycle there of length 2s is a cycle with s runs.
    """
    n = len(ball.names)
    line_of = [[-1, -1] for _ in range(n)]
    parent = list(range(2 * n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, x in ball.edges:
        a, b = find(2 * u + x), find(2 * v + x)
        if a != b:
            parent[a] = b
    roots: dict[int, int] = {}
    for v in range(n):
        for x in (0, 1):
            line_of[v][x] = roots.setdefault(find(2 * v + x), n + len(roots))
    adj: list[list[int]] = [[] for _ in range(n + len(roots))]
    for v in range(n):
        for x in (0, 1):
            adj[v].append(line_of[v][x])
            adj[line_of[v][x]].append(v)
    g, _, _, p1, p2 = _girth(adj)
    if g == INF:
        return INF, []
    cyc = [z for z in p1[::-1] + p2 if z < n]
    return g // 2, cyc


def _lines_are_paths(ball: DihedralBall) -> bool:
    """Each single-letter line in the ball is a simple path (no letter has finite order)."""
    for x in (0, 1):
        out_deg = [0] * len(ball.names)
        in_deg = [0] * len(ball.names)
        nxt = {}
        for u, v, y in ball.edges:
            if y == x:
                out_deg[u] += 1
                in_deg[v] += 1
                nxt[u] = v
        if max(out_deg + in_deg, default=0) > 1:
            return False
        for start in range(len(ball.names)):
            if in_deg[start] == 0:
                continue
            seen, z = set(), start
            while z in nxt:
                if z in seen:
                    return False
                seen.add(z)
                z = nxt[z]
    return True


def letter_shift_preserves(ball: DihedralBall, letter: int) -> bool:
    """Whether right multiplication by one letter carries ball edges to ball edges, labels kept."""
    grp = DihedralArtin(ball.m)
    names = {n: i for i, n in enumerate(ball.names)}
    elems = [_parse(grp, n, ball.letters) for n in ball.names]
    edge_set = {(u, v, x) for u, v, x in ball.edges}
    for u, v, x in ball.edges:
        su = names.get(grp.name(grp.times(elems[u], letter, 1), ball.letters))
        sv = names.get(grp.name(grp.times(elems[v], letter, 1), ball.letters))
        if su is None or sv is None:
            continue
        if (su, sv, x) not in edge_set:
            return False
    return True


def _parse(grp: DihedralArtin, name: str, letters: Sequence[str]) -> Element:
    if name == "1":
        return grp.identity
    k, ss = 0, []
    for part in name.split("."):
        if part.startswith("D^"):
            k = int(part[2:])
        else:
            ss.append((letters.index(part[0]), len(part)))
    return k, tuple(ss)


# ---------------------------------------------------------------------------
# piece profile and certification


@dataclass(frozen=True)
class EdgeProfile:
    u: str
    v: str
    m: int
    radius: int
    girth: int | float
    syllable_girth: int | float
    lines_are_paths: bool
    girth_cycle: tuple[str, ...] = ()

    @property
    def verified(self) -> bool:
        return self.lines_are_paths and self.syllable_girth == 2 * self.m == self.girth

    def as_dict(self) -> dict:
        return {"edge": [self.u, self.v], "m": self.m, "radius": self.radius,
                "girth": "inf" if self.girth == INF else self.girth,
                "syllable_girth": "inf" if self.syllable_girth == INF else self.syllable_girth,
                "lines_are_paths": self.lines_are_paths, "verified": self.verified,
                "girth_cycle": list(self.girth_cycle)}


@dataclass(frozen=True)
class ArtinProfile:
    graph: LabeledGraph
    radius: int
    edges: tuple[EdgeProfile, ...]
    overlaps: tuple[dict, ...]
    longer_overlaps: tuple[dict, ...] = ()
    wall_pieces: int = 0

    @property
    def verified(self) -> bool:
        return all(e.verified for e in self.edges) and not self.longer_overlaps and not self.wall_pieces

    def as_dict(self) -> dict:
        return {"status": "Verified" if self.verified else "NotVerified", "radius": self.radius,
                "relators": [e.as_dict() for e in self.edges], "overlaps": list(self.overlaps),
                "longer_overlaps": list(self.longer_overlaps), "wall_pieces": self.wall_pieces,
                "note": GIRTH_NOTE}


@lru_cache(maxsize=64)
def _edge_profile(u: str, v: str, m: int, R: int) -> EdgeProfile:
    ball = dihedral_ball(m, R, (u, v))
    adj: list[list[int]] = [[] for _ in ball.names]
    for a, b, _ in ball.edges:
        adj[a].append(b)
        adj[b].append(a)
    g = _girth(adj)[0]
    sg, cyc = syllable_girth(ball)
    return EdgeProfile(u, v, m, R, g, sg, _lines_are_paths(ball), tuple(ball.names[z] for z in cyc))


def artin_piece_profile(G: LabeledGraph, R: int | None = None) -> ArtinProfile:
    """Check, on radius-R balls, that overlaps of relators are single-letter segments.

    Two relators overlap only along lines of a generator they share, so
    every overlap is a power of one letter as long as those lines are simple
    paths; a relator cycle then meets each such line in runs of one edge.
    """
    finite = G.finite_edges()
    if R is None:
        R = max((m for _, _, m in finite), default=1) + 1
    profiles = tuple(_edge_profile(u, v, m, R) for u, v, m in finite)
    overlaps, longer = [], []
    for i, (u1, v1, _) in enumerate(finite):
        for j, (u2, v2, _) in enumerate(finite):
            if j <= i:
                continue
            shared = sorted({u1, v1} & {u2, v2}, key=G.vertices.index)
            if not shared:
                continue
            rec = {"relators": [[u1, v1], [u2, v2]], "letters": shared,
                   "single_letter": len(shared) == 1 and profiles[i].lines_are_paths and profiles[j].lines_are_paths}
            overlaps.append(rec)
            if not rec["single_letter"]:
                longer.append(rec)
    return ArtinProfile(G, R, profiles, tuple(overlaps), tuple(longer), 0)


def _relator_steps(u: str, v: str, m: int) -> tuple[tuple[str, int], ...]:
    letters = (u, v)
    return tuple((letters[x], s) for x, s in DihedralArtin(m).relator())


def certify_artin_cn(G: LabeledGraph, n: int, R: int | None = None) -> CnVerdict:
    """Certified iff n <= 2 * (smallest finite label), using the verified profile."""
    profile = artin_piece_profile(G, R)
    if not profile.verified:
        bad = [e.as_dict() for e in profile.edges if not e.verified]
        raise ProfileNotVerified(f"profile not verified at radius {profile.radius}: {bad or profile.longer_overlaps}")
    finite = G.finite_edges()
    extra = {"note": GIRTH_NOTE, "radius": profile.radius}
    if not finite:
        extra["certified_max_n"] = "inf"
        return CnVerdict("Certified", n, profile.radius, reason="no finite labels, no relators", extra=extra)
    k, (u, v, m) = min(enumerate(finite), key=lambda t: (t[1][2], t[0]))
    bound = min(int(e.syllable_girth) for e in profile.edges)
    extra["certified_max_n"] = bound
    if n <= bound:
        return CnVerdict("Certified", n, profile.radius, extra=extra)
    cyc = _relator_steps(u, v, m)
    return CnVerdict("Refuted", n, profile.radius, k, cyc, tuple((s,) for s in cyc), extra=extra)
