from fractions import Fraction

import pytest
from hypothesis import given, settings

from conftest import rooted_pairs, seeded_pair, unrooted_pairs
from polydist.hausdorff import (
    adversarial_refinement,
    classification_counts,
    equivalence_certificate,
    hausdorff_bounds,
)
from polydist.oracle import classify, enumerate_phylogenies, hausdorff_exact
from polydist.trees import Kind, Phylogeny, is_refinement


class TestClassificationCounts:
    @given(rooted_pairs())
    @settings(max_examples=50, deadline=None)
    def test_rooted_fast_path_matches_oracle(self, pair):
        a, b = pair
        assert classification_counts(a, b) == classify(a, b)

    def test_unrooted(self):
        a, b = seeded_pair(Kind.UNROOTED, 8, 3)
        assert classification_counts(a, b) == classify(a, b)


class TestBounds:
    def test_formulae(self):
        t1 = Phylogeny.rooted("abcd", ((("a", "b"), "c"), "d"))
        t2 = Phylogeny.rooted("abcd", (("a", "b"), "c", "d"))
        hb = hausdorff_bounds(t1, t2)
        c = hb.components
        assert hb.lower == c.d + Fraction(2, 3) * max(c.r1, c.r2)
        assert hb.upper == c.d + c.r1 + c.r2 + c.u

    def test_identical_trees(self):
        t = Phylogeny.rooted("abcde", (("a", "b"), "c", ("d", "e")))
        hb = hausdorff_bounds(t, t)
        assert hb.lower == 0
        # identical partial trees can still have a positive upper bound
        assert hb.upper == hb.components.u

    @pytest.mark.parametrize("kind,n", [(Kind.ROOTED, 4), (Kind.UNROOTED, 5)])
    def test_exhaustive_sandwich_against_exact(self, kind, n):
        trees = list(enumerate_phylogenies(n, kind))
        for a in trees:
            for b in trees:
                hb = hausdorff_bounds(a, b)
                exact = hausdorff_exact(a, b)
                assert hb.lower <= exact <= hb.upper


class TestAdversarial:
    def check(self, a, b):
        ar = adversarial_refinement(a, b)
        c_final = classify(ar.refined, b)
        assert c_final.r2 == 0
        assert is_refinement(a, ar.refined)
        assert ar.d_achieved == c_final.d
        assert ar.d_achieved >= ar.certified_lower
        assert ar.certified_lower == ar.d_initial + Fraction(2, 3) * ar.r2_initial

    def test_exhaustive_rooted_four(self):
        trees = list(enumerate_phylogenies(4, Kind.ROOTED))
        for a in trees:
            for b in trees:
                self.check(a, b)

    def test_exhaustive_unrooted_five(self):
        trees = list(enumerate_phylogenies(5, Kind.UNROOTED))
        for a in trees:
            for b in trees:
                self.check(a, b)

    @given(rooted_pairs(max_n=9))
    @settings(max_examples=25, deadline=None)
    def test_random_rooted(self, pair):
        self.check(*pair)

    @given(unrooted_pairs(max_n=8))
    @settings(max_examples=15, deadline=None)
    def test_random_unrooted(self, pair):
        self.check(*pair)

    def test_deterministic(self):
        a, b = seeded_pair(Kind.ROOTED, 8, 11)
        r1 = adversarial_refinement(a, b)
        r2 = adversarial_refinement(a, b)
        assert r1.refined.canonical_key() == r2.refined.canonical_key()


class TestEquivalenceCertificate:
    def test_holds_and_factor(self):
        a = Phylogeny.rooted("abcd", (("a", "b"), ("c", "d")))
        b = Phylogeny.rooted("abcd", (("a", "c"), ("b", "d")))
        cert = equivalence_certificate(a, b, Fraction(1, 2))
        assert cert.holds and cert.factor == Fraction(9, 2)

    def test_fails_when_everything_unresolved(self):
        fan = Phylogeny.rooted("abcd", ("a", "b", "c", "d"))
        cert = equivalence_certificate(fan, fan, 1)
        assert not cert.holds and cert.factor is None

    def test_rejects_nonpositive_beta(self):
        t = Phylogeny.rooted("abc", (("a", "b"), "c"))
        with pytest.raises(ValueError):
            equivalence_certificate(t, t, 0)
