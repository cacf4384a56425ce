import math
import random
from collections import Counter

import pytest

from classical import classical_L, classical_girth
from cubicalsc.complex_core.builders import graph, grid, path_graph, rose, torus
from cubicalsc.maps import (
    BoundaryMismatch,
    CombinatorialMap,
    MissingAssignment,
    NotImmersed,
    check_local_isometry,
    check_minimal,
    check_symmetric,
    fiber_product,
    finite_index,
    identity_map,
    inclusion,
    validate_map,
)
from cubicalsc.presentation import (
    CubicalPresentation,
    NotLocalIsometry,
    check_cn,
    cone_pieces,
    min_piece_girth,
    piece_bound,
    rose_presentation,
    wall_pieces,
)


def labelled(base, vertices, edges):
    """Graph with edges ``(id, u, v, "a+")`` mapped to the rose ``base``."""
    K = graph(vertices, [(e, u, v) for e, u, v, _ in edges])
    o = base.vertices[0]
    cells = {v: (o, (0,)) for v in vertices}
    for e, _, _, lab in edges:
        cells[e] = (lab[:-1], (0, 1) if lab[-1] == "+" else (1, 0))
    return CombinatorialMap(K, base, cells)


def cyclic_cover(base, d, shifts):
    """Regular cover with vertex set Z/d; letter x moves k to k + shifts[x]."""
    verts = [f"k{i}" for i in range(d)]
    edges = [(f"{x}{i}", f"k{i}", f"k{(i + s) % d}", f"{x}+") for x, s in shifts.items() for i in range(d)]
    return labelled(base, verts, edges)


def random_word(rng, letters, n):
    while True:
        w = "".join(rng.choice(letters + letters.upper()) for _ in range(n))
        if all(w[k] != w[(k + 1) % n].swapcase() for k in range(n)):
            return w


def word_corpus():
    rng = random.Random(2024)
    words = ["abAB", "aa", "ab", "aab", "abab", "aabb", "abcABC", "aabAB", "abaBAB", "ababab",
             "abABabAB", "aaaaaa", "abbaBBAb"]
    while len(words) < 40:
        words.append(random_word(rng, rng.choice(["ab", "abc"]), rng.randint(2, 12)))
    return words


def counts_by_dim(X):
    return [len(X.of_dim(k)) for k in range(4)]


def preimage_oracle(f, g):
    """Counting identity computed straight from the preimages."""
    fa = Counter(f(c) for c in f.domain.cells)
    gb = Counter(g(c) for c in g.domain.cells)
    out = [0, 0, 0, 0]
    for c in f.codomain:
        out[c.dim] += fa[c.id] * gb[c.id]
    return out


# ---------------------------------------------------------------------------
# maps


def test_validate_map_examples():
    T = torus()
    ident = validate_map({"vertex_map": {"v": "v"}, "edge_map": {"a": "a+", "b": "b+"},
                          "square_map": {"s": "s"}}, T, T)
    assert ident.is_isomorphism()
    R = rose(["a"])
    C2 = graph(["u", "w"], [("x", "u", "w"), ("y", "w", "u")])
    cover = validate_map({"vertex_map": {"u": "o", "w": "o"}, "edge_map": {"x": "a+", "y": "a+"}}, C2, R)
    assert check_local_isometry(cover)
    with pytest.raises(MissingAssignment):
        validate_map({"vertex_map": {"u": "o", "w": "o"}, "edge_map": {"x": "a+"}}, C2, R)
    P = path_graph(1)
    with pytest.raises((MissingAssignment, BoundaryMismatch)):
        validate_map({"vertex_map": {"p0": "o", "p1": "o"}, "edge_map": {"pe0": "o+"}}, P, R)


def test_local_isometry_examples():
    R = rose(["a", "b"])
    fold = labelled(R, ["u", "w"], [("x", "u", "w", "a+"), ("y", "u", "w", "a+")])
    v = check_local_isometry(fold)
    assert not v and v.problem == "nodes-not-injective"
    T = torus()
    edge = graph(["v"], [("a", "v", "v")])
    assert check_local_isometry(inclusion(edge, T))
    assert check_local_isometry(identity_map(T))


def test_fiber_product_examples():
    R = rose(["a"])
    c2 = cyclic_cover(R, 2, {"a": 1})
    fp = fiber_product(c2, c2)
    assert counts_by_dim(fp.total) == [4, 4, 0, 0]
    assert len(fp.components) == 2
    assert all(c.iso_left and c.iso_right for c in fp.components)
    assert sum(c.diagonal for c in fp.components) == 1
    T = torus()
    fp = fiber_product(identity_map(T), identity_map(T))
    assert len(fp.components) == 1 and fp.components[0].diagonal
    G = grid(2, 2)
    left = G.subcomplex(G.closure(["s0.0xy"]))
    right = G.subcomplex(G.closure(["s1.1xy"]))
    fp = fiber_product(inclusion(left, G), inclusion(right, G))
    assert counts_by_dim(fp.total) == [1, 0, 0, 0]


def test_fiber_product_counting_identity():
    R = rose(["a", "b"])
    maps = [cyclic_cover(R, d, {"a": 1, "b": s}) for d, s in [(1, 0), (2, 1), (3, 1), (3, 0), (4, 2)]]
    maps += [rose_presentation("ab", [w]).relators[0] for w in word_corpus()[:12]]
    for f in maps:
        for g in maps[:6]:
            fp = fiber_product(f, g)
            assert counts_by_dim(fp.total) == preimage_oracle(f, g)
            assert fp.proj_left.compose(f).cells == fp.proj_right.compose(g).cells or all(
                fp.proj_left.compose(f)(c) == fp.proj_right.compose(g)(c) for c in fp.total.cells)
    T = torus()
    for f in (identity_map(T), inclusion(graph(["v"], [("a", "v", "v")]), T)):
        fp = fiber_product(f, identity_map(T))
        assert counts_by_dim(fp.total) == preimage_oracle(f, identity_map(T))


def test_fiber_product_swap_symmetry():
    R = rose(["a", "b"])
    ws = word_corpus()[:10]
    maps = [rose_presentation("ab", [w]).relators[0] for w in ws if set(w.lower()) <= {"a", "b"}]
    for f in maps:
        for g in maps:
            a = sorted((len(c.complex.vertices), len(c.complex.edges)) for c in fiber_product(f, g).components)
            b = sorted((len(c.complex.vertices), len(c.complex.edges)) for c in fiber_product(g, f).components)
            assert a == b


@pytest.mark.parametrize("d,shift", [(2, 1), (3, 1), (3, 2), (4, 1), (5, 2)])
def test_regular_cover_self_product(d, shift):
    R = rose(["a", "b"])
    f = cyclic_cover(R, d, {"a": 1, "b": shift})
    assert check_local_isometry(f)
    fp = fiber_product(f, f)
    assert len(fp.total.vertices) == d * d * len(R.vertices)
    assert len(fp.components) == d
    assert all(c.iso_left and c.iso_right for c in fp.components)
    assert finite_index(f) == d


def test_finite_index_examples():
    Ra, Rab = rose(["a"]), rose(["a", "b"])
    assert finite_index(cyclic_cover(Ra, 2, {"a": 1})) == 2
    edge = labelled(Ra, ["u", "w"], [("x", "u", "w", "a+")])
    assert finite_index(edge) == math.inf
    # the two-vertex graph with an a-cycle of length 2 and a b-loop at each vertex
    two = labelled(Rab, ["u", "w"], [("x", "u", "w", "a+"), ("y", "w", "u", "a+"),
                                     ("b0", "u", "u", "b+"), ("b1", "w", "w", "b+")])
    assert finite_index(two) == 2
    # the subgroup generated by a^2 and b alone: one b-loop only, not a cover
    lean = labelled(Rab, ["u", "w"], [("x", "u", "w", "a+"), ("y", "w", "u", "a+"), ("b0", "u", "u", "b+")])
    assert finite_index(lean) == math.inf
    fold = labelled(Rab, ["u", "w"], [("x", "u", "w", "a+"), ("y", "u", "w", "a+")])
    with pytest.raises(NotImmersed):
        finite_index(fold)


def test_symmetric_and_minimal_examples():
    cover = rose_presentation("a", ["aa"])
    assert all(v.holds for v in check_symmetric(cover))
    assert "PARTIAL" in check_symmetric(cover)[0].note
    m = check_minimal(cover)[0]
    assert not m.holds and len(m.witness) == 1
    w = m.witness[0]
    assert w.iso_left and w.iso_right and not w.diagonal
    comm = rose_presentation("ab", ["abAB"])
    assert check_symmetric(comm)[0].holds and check_minimal(comm)[0].holds
    empty = CubicalPresentation(rose(["a", "b"]))
    assert check_symmetric(empty) == [] and check_minimal(empty) == []


def test_minimal_agrees_with_cone_pieces():
    for w in word_corpus():
        p = rose_presentation("abc", [w])
        fp = fiber_product(p.relators[0], p.relators[0])
        off_diag = [c for c in fp.components if not c.diagonal and c.edge_count]
        sources = [P.source for P in cone_pieces(p)]
        if check_minimal(p)[0].holds:
            assert len(off_diag) == len(sources), w
        else:
            assert len(sources) < len(off_diag), w


def test_covers_are_local_isometries():
    rng = random.Random(3)
    R = rose(["a", "b"])
    for _ in range(20):
        d = rng.randint(1, 6)
        perm_a = list(range(d))
        perm_b = list(range(d))
        rng.shuffle(perm_a)
        rng.shuffle(perm_b)
        verts = [f"k{i}" for i in range(d)]
        edges = [(f"a{i}", f"k{i}", f"k{perm_a[i]}", "a+") for i in range(d)]
        edges += [(f"b{i}", f"k{i}", f"k{perm_b[i]}", "b+") for i in range(d)]
        f = labelled(R, verts, edges)
        assert check_local_isometry(f)
        if f.domain.is_connected():
            assert finite_index(f) == d


# ---------------------------------------------------------------------------
# presentation


def test_commutator_presentation():
    p = rose_presentation("ab", ["abAB"])
    assert [P.edge_count for P in p.pieces] == [1, 1, 1, 1]
    assert piece_bound(p).L == 1
    g = min_piece_girth(p, 0)
    assert g.value == 4 and g.exact
    assert check_cn(p, 4).status == "Certified"
    ref = check_cn(p, 5)
    assert ref.status == "Refuted" and len(ref.decomposition) == 4
    assert ref.as_dict()["witness"]["piece_count"] == 4


def test_cover_presentation():
    p = rose_presentation("a", ["aa"])
    assert cone_pieces(p) == [] and piece_bound(p).L == 0
    assert min_piece_girth(p, 0).value == math.inf
    assert check_cn(p, 9).status == "Certified"


def test_no_relators_is_free():
    p = CubicalPresentation(rose(["a", "b"]))
    assert check_cn(p, 100).status == "Certified"


def test_disjoint_relators_share_no_pieces():
    p = rose_presentation("abcd", ["abAB", "cdCD"])
    assert all(P.partner == P.relator for P in p.pieces)


def test_rose_has_no_wall_pieces():
    assert wall_pieces(rose_presentation("ab", ["abAB"])) == []


def test_wall_pieces_on_grid_boundary():
    G = grid(2, 2)
    Y = G.subcomplex(G.closure(["e0.0x"]))
    p = CubicalPresentation(G, (inclusion(Y, G),))
    walls = wall_pieces(p)
    assert walls and all(P.kind == "wall" and P.edge_count == 1 for P in walls)
    assert all(P.classified for P in walls)
    assert check_cn(p, 50).status == "Certified"


def test_relator_must_be_local_isometry():
    R = rose(["a", "b"])
    fold = labelled(R, ["u", "w"], [("x", "u", "w", "a+"), ("y", "u", "w", "a+")])
    with pytest.raises(NotLocalIsometry):
        CubicalPresentation(R, (fold,))


def test_unbounded_piece_refutes_c2():
    p = rose_presentation("ab", ["abAB", "abABabAB"])
    pb = piece_bound(p)
    assert pb.L == math.inf and pb.unbounded_witness is not None
    assert check_cn(p, 2).status == "Refuted"


@pytest.mark.parametrize("word", word_corpus())
def test_classical_string_matching_agrees(word):
    p = rose_presentation("abc", [word])
    L = piece_bound(p).L
    assert L == classical_L(word)
    g = min_piece_girth(p, 0)
    assert g.value == classical_girth(word)


def test_word_corpus_is_large_enough():
    words = word_corpus()
    assert len(words) >= 30 and max(map(len, words)) <= 12


def test_check_cn_monotone():
    for w in word_corpus()[:25]:
        p = rose_presentation("abc", [w])
        verdicts = [check_cn(p, n).status for n in range(2, 9)]
        certified = [s == "Certified" for s in verdicts]
        # once certification fails it never comes back
        assert certified == sorted(certified, reverse=True), (w, verdicts)


def test_extra_pieces_never_certify():
    words = word_corpus()[:14]
    for w in words:
        base = rose_presentation("abc", [w])
        for extra in words[:6]:
            more = rose_presentation("abc", [w, extra])
            for n in (3, 4, 6):
                if check_cn(base, n).status == "Refuted":
                    assert check_cn(more, n).status != "Certified", (w, extra, n)


def test_decompositions_respect_piece_bound():
    for w in word_corpus():
        p = rose_presentation("abc", [w])
        L = piece_bound(p).L
        g = min_piece_girth(p, 0)
        if g.exact and g.value != math.inf:
            assert all(len(part) <= L for part in g.decomposition)
            assert sum(len(part) for part in g.decomposition) == len(g.cycle)
