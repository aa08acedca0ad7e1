import itertools
from fractions import Fraction
from math import comb

from hypothesis import given, settings

from conftest import rooted_pairs, rooted_trees, seeded_pair
from polydist.oracle import classify_triplets, enumerate_phylogenies
from polydist.trees import Kind, Phylogeny
from polydist.triplet import (
    build_tables,
    count_R_U,
    count_r1,
    count_shared,
    parametric_triplet_distance,
)


def oracle_pair(a, b):
    c = classify_triplets(a, b)
    return c.d, c.r1 + c.r2


class TestTables:
    def test_leaf_and_root_entries(self):
        t1 = Phylogeny.rooted("abcd", ((("a", "b"), "c"), "d"))
        t2 = Phylogeny.rooted("abcd", (("a", "c"), ("b", "d")))
        tab = build_tables(t1, t2)
        la = t1.leaf_of_taxon("a")
        assert tab.I[la, t2.leaf_of_taxon("a")] == 1
        assert tab.I[t1.root, t2.root] == 4
        assert tab.comp_comp()[t1.root, t2.root] == 0

    def test_named_intersection(self):
        t1 = Phylogeny.rooted("abcd", ((("a", "b"), "c"), "d"))
        t2 = Phylogeny.rooted("abcd", (("a", "c"), ("b", "d")))
        u = next(v for v in t1.internal_nodes() if t1.subtree_taxa(v) == frozenset({0, 1}))
        v = next(w for w in t2.internal_nodes() if t2.subtree_taxa(w) == frozenset({0, 2}))
        assert build_tables(t1, t2).I[u, v] == 1

    @given(rooted_pairs())
    @settings(max_examples=50, deadline=None)
    def test_quadrants_sum_to_n(self, pair):
        a, b = pair
        tab = build_tables(a, b)
        total = tab.I + tab.inter_comp() + tab.comp_inter() + tab.comp_comp()
        assert (total == a.n).all()
        # direct set computation on a sample of node pairs
        for u in a.internal_nodes()[:4]:
            for v in b.internal_nodes()[:4]:
                assert tab.I[u, v] == len(a.subtree_taxa(u) & b.subtree_taxa(v))


class TestCountRU:
    def test_extremes(self):
        binary = Phylogeny.rooted("abcde", ((("a", "b"), "c"), ("d", "e")))
        assert count_R_U(binary) == (comb(5, 3), 0)
        fan = Phylogeny.rooted("abcde", tuple("abcde"))
        assert count_R_U(fan) == (0, comb(5, 3))

    def test_partial(self):
        t = Phylogeny.rooted("abcd", (("a", "b"), "c", "d"))
        assert count_R_U(t) == (2, 2)

    def test_exhaustive_against_classification(self):
        for n in (4, 5, 6):
            for t in enumerate_phylogenies(n, Kind.ROOTED):
                c = classify_triplets(t, t)
                assert count_R_U(t) == (c.s, c.u)


class TestSharedAndR1:
    def test_known_small_pairs(self):
        t1 = Phylogeny.rooted("abcd", ((("a", "b"), "c"), "d"))
        t2 = Phylogeny.rooted("abcd", (("a", "b"), "c", "d"))
        tab = build_tables(t1, t2)
        assert count_shared(tab) == 2
        assert count_r1(tab) == 2
        assert count_r1(build_tables(t2, t1)) == 0  # nothing resolved only in t2
        a = Phylogeny.rooted("abcd", (("a", "b"), ("c", "d")))
        b = Phylogeny.rooted("abcd", (("a", "c"), ("b", "d")))
        assert count_shared(build_tables(a, b)) == 0

    def test_binary_t2_means_zero_r1(self):
        t1 = Phylogeny.rooted("abcd", (("a", "b"), "c", "d"))
        t2 = Phylogeny.rooted("abcd", ((("a", "b"), "c"), "d"))
        assert count_r1(build_tables(t1, t2)) == 0

    @given(rooted_pairs())
    @settings(max_examples=60, deadline=None)
    def test_matches_classification(self, pair):
        a, b = pair
        c = classify_triplets(a, b)
        tab = build_tables(a, b)
        assert count_shared(tab) == c.s
        assert count_r1(tab) == c.r1


class TestParametricDistance:
    def test_identical(self):
        t = Phylogeny.rooted("abcde", (("a", ("b", "c")), "d", "e"))
        dp = parametric_triplet_distance(t, t)
        assert (dp.d_count, dp.r_count) == (0, 0)

    def test_known_small_values(self):
        t1 = Phylogeny.rooted("abcd", ((("a", "b"), "c"), "d"))
        t2 = Phylogeny.rooted("abcd", (("a", "b"), "c", "d"))
        dp = parametric_triplet_distance(t1, t2)
        assert (dp.d_count, dp.r_count) == (0, 2)
        assert dp.evaluate(Fraction(1, 2)) == 1
        a = Phylogeny.rooted("abcd", (("a", "b"), ("c", "d")))
        b = Phylogeny.rooted("abcd", (("a", "c"), ("b", "d")))
        assert parametric_triplet_distance(a, b) == type(dp)(4, 0)

    def test_exhaustive_all_pairs_small(self):
        for n in (3, 4):
            trees = list(enumerate_phylogenies(n, Kind.ROOTED))
            for a in trees:
                for b in trees:
                    dp = parametric_triplet_distance(a, b)
                    assert (dp.d_count, dp.r_count) == oracle_pair(a, b)

    @given(rooted_pairs(max_n=16))
    @settings(max_examples=80, deadline=None)
    def test_random_oracle_equivalence(self, pair):
        a, b = pair
        dp = parametric_triplet_distance(a, b)
        assert (dp.d_count, dp.r_count) == oracle_pair(a, b)

    def test_swap_symmetry(self):
        for seed in range(10):
            a, b = seeded_pair(Kind.ROOTED, 9, seed)
            ab = parametric_triplet_distance(a, b)
            ba = parametric_triplet_distance(b, a)
            assert (ab.d_count, ab.r_count) == (ba.d_count, ba.r_count)

    def test_degenerate_small_n(self):
        one = Phylogeny.rooted(("a",), "a")
        assert parametric_triplet_distance(one, one).evaluate(1) == 0


@given(rooted_trees())
@settings(max_examples=40, deadline=None)
def test_strict_induction_consistency(tree):
    # every resolved triplet is induced at exactly one internal non-root node
    R, U = count_R_U(tree)
    resolved = sum(1 for X in itertools.combinations(range(tree.n), 3)
                   if _is_resolved(tree, X))
    assert R == resolved
    assert R + U == comb(tree.n, 3)


def _is_resolved(tree, X):
    from polydist.trees import TripletTopology, triplet_topology
    return triplet_topology(tree, X) is not TripletTopology.FAN
