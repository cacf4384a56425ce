import random
import time

import pytest

from cubicalsc.artin import (
    DihedralArtin,
    LabeledGraph,
    LabeledGraphError,
    NotFoundWithin,
    ProfileNotVerified,
    RadiusTooLargeForBudget,
    artin_piece_profile,
    build_rose,
    certify_artin_cn,
    dihedral_ball,
    girth_dihedral,
    letter_shift_preserves,
    syllable_girth,
)
from cubicalsc.presentation import check_cn, rose_presentation


def coxeter_image(m, word):
    """Image in the dihedral Coxeter group as an affine map i -> e*i + t on Z/m, plus exponent sums."""
    e, t = 1, 0
    sums = [0, 0]
    for x, s in word:
        # reflections i -> -i and i -> 1 - i, composed on the right
        e, t = -e, (t if x == 0 else t + e) % m
        sums[x] += s
    key = sum(sums) if m % 2 else tuple(sums)
    return e, t % m, key


def random_word(rng, n):
    return [(rng.randint(0, 1), rng.choice((1, -1))) for _ in range(n)]


def invert(word):
    return [(x, -s) for x, s in reversed(word)]


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6, 7])
def test_normal_form_against_coxeter_quotient(m):
    grp = DihedralArtin(m)
    rng = random.Random(m)
    for _ in range(300):
        w = random_word(rng, rng.randint(0, 14))
        g = grp.from_word(w)
        assert coxeter_image(m, grp.word(g)) == coxeter_image(m, w)
        assert grp.from_word(grp.word(g)) == g
        assert grp.from_word(w + invert(w)) == grp.identity


@pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
def test_relation_and_insertions(m):
    grp = DihedralArtin(m)
    rel = grp.relator()
    assert grp.from_word(rel) == grp.identity
    rng = random.Random(10 + m)
    for _ in range(200):
        w = random_word(rng, rng.randint(0, 10))
        k = rng.randint(0, len(w))
        r = rel if rng.random() < 0.5 else invert(rel)
        assert grp.from_word(w[:k] + r + w[k:]) == grp.from_word(w)


def test_abelian_case_is_exact():
    grp = DihedralArtin(2)
    rng = random.Random(0)
    for _ in range(300):
        w1, w2 = random_word(rng, 8), random_word(rng, 8)
        same = coxeter_image(2, w1)[2] == coxeter_image(2, w2)[2]
        assert (grp.from_word(w1) == grp.from_word(w2)) == same


def test_short_words_are_nontrivial():
    # below length 2m the only trivial reduced words are empty
    for m in (3, 4):
        grp = DihedralArtin(m)
        rng = random.Random(m)
        for _ in range(500):
            w = random_word(rng, rng.randint(1, 2 * m - 1))
            if any(w[i][0] == w[i + 1][0] and w[i][1] == -w[i + 1][1] for i in range(len(w) - 1)):
                continue
            assert grp.from_word(w) != grp.identity


def test_labeled_graph_validation():
    with pytest.raises(LabeledGraphError):
        LabeledGraph(("a",), (("a", "a", 3),))
    with pytest.raises(LabeledGraphError):
        LabeledGraph(("a", "b"), (("a", "b", 3), ("b", "a", 4)))
    with pytest.raises(LabeledGraphError):
        LabeledGraph(("a", "b"), (("a", "b", 1),))
    G = LabeledGraph.from_dict({"vertices": ["a", "b"], "edges": [{"u": "a", "v": "b", "m": "inf"}]})
    assert G.finite_edges() == []


def test_build_rose():
    assert len(build_rose(LabeledGraph(("a", "b"))).edges) == 2
    assert len(build_rose(LabeledGraph(())).cells) == 1
    tri = LabeledGraph(("a", "b", "c"), (("a", "b", 5), ("b", "c", 5), ("a", "c", 5)))
    assert len(build_rose(tri).edges) == 3


def test_ball_shapes():
    star = dihedral_ball(5, 1)
    assert len(star.names) == 5 and len(star.edges) == 4
    assert isinstance(girth_dihedral(5, 1), NotFoundWithin)
    for m in (2, 3, 5):
        for R in (2, 3, 4):
            assert dihedral_ball(m, R).interior_regular()
    with pytest.raises(RadiusTooLargeForBudget):
        dihedral_ball(6, 8, max_vertices=1000)


def test_ball_is_a_covering_of_the_rose():
    from cubicalsc.maps import check_local_isometry
    ball = dihedral_ball(3, 3)
    assert check_local_isometry(ball.covering())


def test_girth_examples():
    assert girth_dihedral(2, 2) == 4
    assert girth_dihedral(3, 3) == 6
    assert girth_dihedral(5, 6) == 10
    assert girth_dihedral(2, 3) == 4
    assert girth_dihedral(6, 4) == NotFoundWithin(4)


def test_girth_is_2m_and_monotone():
    t = time.perf_counter()
    for m in range(2, 7):
        assert girth_dihedral(m, m + 1) == 2 * m
        values = [girth_dihedral(m, R) for R in range(1, m + 2)]
        found = [v for v in values if not isinstance(v, NotFoundWithin)]
        assert found == sorted(found, reverse=True)
    assert time.perf_counter() - t < 30


def test_syllable_girth_is_2m():
    for m in (2, 3, 4, 5):
        sg, cyc = syllable_girth(dihedral_ball(m, m + 1))
        assert sg == 2 * m and len(cyc) >= 2 * m


def test_profile_examples():
    edge = LabeledGraph(("a", "b"), (("a", "b", 5),))
    prof = artin_piece_profile(edge, 5)
    assert prof.verified and prof.overlaps == () and prof.wall_pieces == 0
    disjoint = LabeledGraph(("a", "b", "c", "d"), (("a", "b", 5), ("c", "d", 5)))
    assert artin_piece_profile(disjoint, 5).overlaps == ()
    path = LabeledGraph(("v1", "v2", "v3"), (("v1", "v2", 5), ("v2", "v3", 5)))
    prof = artin_piece_profile(path, 5)
    assert prof.verified
    assert [o["letters"] for o in prof.overlaps] == [["v2"]]


def test_certify_examples():
    edge5 = LabeledGraph(("a", "b"), (("a", "b", 5),))
    assert certify_artin_cn(edge5, 9).status == "Certified"
    assert certify_artin_cn(edge5, 10).status == "Certified"
    ref = certify_artin_cn(edge5, 11)
    assert ref.status == "Refuted" and len(ref.decomposition) == 10
    edge4 = LabeledGraph(("a", "b"), (("a", "b", 4),))
    assert certify_artin_cn(edge4, 8).status == "Certified"
    ref = certify_artin_cn(edge4, 9)
    assert ref.status == "Refuted" and len(ref.cycle) == 8
    assert ref.as_dict()["certified_max_n"] == 8
    tri = LabeledGraph(("a", "b", "c"), (("a", "b", 5), ("b", "c", 5), ("a", "c", 5)))
    assert certify_artin_cn(tri, 9).status == "Certified"
    free = LabeledGraph(("a", "b"), (("a", "b", "inf"),))
    assert all(certify_artin_cn(free, n).status == "Certified" for n in (2, 9, 100))


def test_witness_cycle_is_trivial_in_the_group():
    for m in (2, 3, 4, 5):
        G = LabeledGraph(("a", "b"), (("a", "b", m),))
        ref = certify_artin_cn(G, 2 * m + 1)
        grp = DihedralArtin(m)
        word = [("ab".index(x), s) for x, s in ref.cycle]
        assert grp.from_word(word) == grp.identity and len(word) == 2 * m


def test_certify_needs_enough_radius():
    with pytest.raises(ProfileNotVerified):
        certify_artin_cn(LabeledGraph(("a", "b"), (("a", "b", 5),)), 9, R=3)


def test_agrees_with_check_cn_for_commuting_pair():
    # the relator cycle abAB on the rose is the m = 2 truncation
    p = rose_presentation("ab", ["abAB"])
    G = LabeledGraph(("a", "b"), (("a", "b", 2),))
    for n in (3, 4, 5, 6):
        assert check_cn(p, n).status == certify_artin_cn(G, n).status


def test_single_letter_shift_is_not_a_symmetry():
    for m in (3, 4, 5, 6):
        ball = dihedral_ball(m, 4)
        assert not letter_shift_preserves(ball, 0) and not letter_shift_preserves(ball, 1)
    # commuting generators: right and left multiplication agree
    assert letter_shift_preserves(dihedral_ball(2, 4), 0)
