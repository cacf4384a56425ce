"""Free faces, hyperplane-guided collapse to a point, and certificate replay."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .cells import ComplexError, CubeComplex, Subcomplex, describe
from .hyperplanes import crossing_directions, hyperplanes, mid_name, midcube_complex
from .links import check_npc


class NotNPC(ComplexError):
    kind = "NotNPC"


@dataclass(frozen=True)
class CollapseCertificate:
    steps: tuple[tuple[str, str], ...]
    terminal_vertex: str
    strategy: str = "guided"

    def as_dict(self) -> dict:
        return {"status": "Certified", "strategy": self.strategy,
                "steps": [{"free": f, "maximal": F} for f, F in self.steps],
                "terminal": self.terminal_vertex}

    @classmethod
    def from_dict(cls, raw: dict) -> "CollapseCertificate":
        return cls(tuple((s["free"], s["maximal"]) for s in raw["steps"]), raw["terminal"],
                   raw.get("strategy", "guided"))


@dataclass(frozen=True, eq=False)
class Stuck:
    remaining: Subcomplex
    steps: tuple[tuple[str, str], ...] = ()
    free_faces: tuple[tuple[str, str], ...] = field(default=())

    def as_dict(self) -> dict:
        return {"status": "Stuck", "steps_before_stuck": [{"free": f, "maximal": F} for f, F in self.steps],
                "free_faces": [list(p) for p in self.free_faces],
                "remaining": describe(self.remaining.complex())}


class _Alive:
    """Mutable view of a shrinking face-closed cell set."""

    def __init__(self, X: CubeComplex, cells=None):
        self.X = X
        self.alive = set(X.cells if cells is None else cells)
        self.cofaces: dict[str, Counter] = {c: Counter() for c in self.alive}
        for c in self.alive:
            for _, f in X[c].facets():
                self.cofaces[f][c] += 1

    def free_pairs(self) -> list[tuple[str, str]]:
        out = []
        for f in self.alive:
            cf = self.cofaces[f]
            if sum(cf.values()) == 1:
                (F,) = cf
                if not self.cofaces[F]:
                    out.append((f, F))
        return sorted(out)

    def is_free(self, f: str, F: str) -> bool:
        if f not in self.alive or F not in self.alive:
            return False
        cf = self.cofaces[f]
        return sum(cf.values()) == 1 and F in cf and not self.cofaces[F]

    def remove(self, f: str, F: str) -> None:
        for c in (F, f):
            self.alive.discard(c)
            for _, g in self.X[c].facets():
                if g in self.cofaces:
                    self.cofaces[g][c] -= 1
                    if self.cofaces[g][c] == 0:
                        del self.cofaces[g][c]


def free_faces(X: CubeComplex) -> list[tuple[str, str]]:
    """Pairs (f, F): F maximal and f lies in no other cell, meeting F once."""
    return _Alive(X).free_pairs()


class _NoProgress(Exception):
    pass


def _guided(X: CubeComplex, start: tuple[str, str] | None = None, depth: int = 0) -> list[tuple[str, str]]:
    """Collapse ``X`` to a point, optionally starting with ``start``; raises _NoProgress when stuck."""
    A = _Alive(X)
    steps: list[tuple[str, str]] = []
    if start is not None:
        if not A.is_free(*start):
            raise _NoProgress(start)
        A.remove(*start)
        steps.append(start)
    while len(A.alive) > 1:
        pairs = A.free_pairs()
        if not pairs:
            raise _NoProgress(tuple(sorted(A.alive)))
        vertex_pairs = [p for p in pairs if X[p[0]].dim == 0]
        if vertex_pairs:
            A.remove(*vertex_pairs[0])
            steps.append(vertex_pairs[0])
            continue
        f, F = pairs[0]
        steps.extend(_carrier_sweep(X, A, f, F, depth))
    return steps


def _carrier_sweep(X: CubeComplex, A: _Alive, f: str, F: str, depth: int) -> list[tuple[str, str]]:
    """Collapse along the hyperplane dual to the smallest edge of ``f``.

    The hyperplane's own collapse order (starting from the midcube of ``f``)
    lifts to pairs of X-cells; each lifted pair is applied only if it is a
    genuine free pair at that moment.  Falls back to the single pair (f, F).
    """
    sub = X.subcomplex(A.alive)
    edge = min(e for e, _ in (X[f].faces.values()) if X[e].dim == 1)
    H = next(h for h in hyperplanes(sub) if edge in h.edges)
    es = frozenset(H.edges)
    if H.self_crossing or depth > 3:
        A.remove(f, F)
        return [(f, F)]
    M, origin = midcube_complex(sub, H)
    i_f = crossing_directions(sub, f, es)[0]
    i_F = [i for i in crossing_directions(sub, F, es)
           if mid_name(f, i_f) in {r for r, _ in M[mid_name(F, i)].faces.values()}]
    if not i_F:
        A.remove(f, F)
        return [(f, F)]
    try:
        hsteps = _guided(M, (mid_name(f, i_f), mid_name(F, i_F[0])), depth + 1)
    except _NoProgress:
        A.remove(f, F)
        return [(f, F)]
    done = []
    for a, b in hsteps:
        pair = (origin[a], origin[b])
        if not A.is_free(*pair):
            break
        A.remove(*pair)
        done.append(pair)
    if not done:
        A.remove(f, F)
        done.append((f, F))
    return done


def collapse_to_point(X: CubeComplex) -> CollapseCertificate | Stuck:
    verdict = check_npc(X)
    if not verdict:
        raise NotNPC(f"not non-positively curved at {verdict.vertex} ({verdict.problem})", verdict.vertex)
    if not X.vertices:
        raise ComplexError("empty complex")
    try:
        steps = _guided(X)
    except _NoProgress:
        steps = None
    if steps is not None:
        rest = set(X.cells) - {c for p in steps for c in p}
        return CollapseCertificate(tuple(steps), next(iter(rest)))
    # deterministic greedy fallback so that Stuck reports a maximal prefix
    A = _Alive(X)
    done = []
    while len(A.alive) > 1:
        pairs = A.free_pairs()
        if not pairs:
            break
        A.remove(*pairs[0])
        done.append(pairs[0])
    if len(A.alive) == 1:
        return CollapseCertificate(tuple(done), next(iter(A.alive)), "greedy")
    return Stuck(Subcomplex(X, frozenset(A.alive), True), tuple(done), ())


@dataclass(frozen=True)
class ReplayReport:
    ok: bool
    failed_step: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def replay(X: CubeComplex, cert: CollapseCertificate) -> ReplayReport:
    """Independent check: recompute cofaces from scratch before every step."""
    alive = set(X.cells)
    chi = X.euler_characteristic()
    if chi != 1:
        return ReplayReport(False, 0, f"Euler characteristic {chi} != 1")
    for t, (f, F) in enumerate(cert.steps):
        if f not in alive or F not in alive:
            return ReplayReport(False, t, "cell already removed")
        holders = [c for c in alive for _, g in X[c].facets() if g == f]
        if holders != [F]:
            return ReplayReport(False, t, f"{f} is not a free face of {F}")
        if any(g == F for c in alive for _, g in X[c].facets()):
            return ReplayReport(False, t, f"{F} is not maximal")
        if X[F].dim != X[f].dim + 1:
            return ReplayReport(False, t, "dimension mismatch")
        alive -= {f, F}
        chi_now = sum((-1) ** X[c].dim for c in alive)
        if chi_now != 1:
            return ReplayReport(False, t, "Euler characteristic changed")
    if alive != {cert.terminal_vertex}:
        return ReplayReport(False, len(cert.steps), "replay does not end at the terminal vertex")
    return ReplayReport(True)
