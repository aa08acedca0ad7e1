import itertools
from fractions import Fraction

import pytest

from polydist.expected import (
    add_leaf,
    asymptotic_unresolved,
    empirical_expected_distance,
    exact_resolution_probability,
    expected_distance_formula,
)
from polydist.oracle import classify, count_phylogenies, enumerate_phylogenies
from polydist.trees import Kind, Phylogeny, TreeError


class TestResolutionProbability:
    def test_small_values(self):
        assert exact_resolution_probability(3, Kind.ROOTED).r == Fraction(3, 4)
        assert exact_resolution_probability(4, Kind.UNROOTED).r == Fraction(3, 4)

    def test_rooted_equals_unrooted_shifted(self):
        for n in (3, 4, 5, 6):
            rooted = exact_resolution_probability(n, Kind.ROOTED)
            unrooted = exact_resolution_probability(n + 1, Kind.UNROOTED,
                                                    cap=max(8, n + 1))
            assert rooted.r == unrooted.r
            assert rooted.trees_total == unrooted.trees_total

    def test_resolved_only_subspace(self):
        stats = exact_resolution_probability(4, Kind.ROOTED, resolved_only=True)
        assert stats.r == 1

    def test_too_small_n(self):
        with pytest.raises(TreeError):
            exact_resolution_probability(2, Kind.ROOTED)


class TestExpectedFormula:
    @pytest.mark.parametrize("p", [0, Fraction(1, 2), 1])
    def test_matches_all_pairs_average_rooted(self, p):
        trees = list(enumerate_phylogenies(4, Kind.ROOTED))
        total = sum(classify(a, b).to_distance_pair().evaluate(p)
                    for a in trees for b in trees)
        average = Fraction(total, len(trees) ** 2)
        assert expected_distance_formula(4, p, Kind.ROOTED) == average

    def test_matches_all_pairs_average_unrooted(self):
        p = Fraction(2, 3)
        trees = list(enumerate_phylogenies(5, Kind.UNROOTED))
        total = sum(classify(a, b).to_distance_pair().evaluate(p)
                    for a in trees for b in trees)
        assert expected_distance_formula(5, p, Kind.UNROOTED) == \
            Fraction(total, len(trees) ** 2)

    def test_monotone_in_p(self):
        values = [expected_distance_formula(5, Fraction(i, 4), Kind.ROOTED)
                  for i in range(5)]
        assert values == sorted(values)


class TestEmpirical:
    def test_reproducible(self):
        a = empirical_expected_distance(4, Fraction(1, 2), Kind.ROOTED, 50, seed=5)
        b = empirical_expected_distance(4, Fraction(1, 2), Kind.ROOTED, 50, seed=5)
        assert a == b
        c = empirical_expected_distance(4, Fraction(1, 2), Kind.ROOTED, 50, seed=6)
        assert a.mean != c.mean or a.stderr_sq != c.stderr_sq

    def test_mean_near_formula(self):
        em = empirical_expected_distance(4, Fraction(1, 2), Kind.ROOTED, 400, seed=0)
        exact = expected_distance_formula(4, Fraction(1, 2), Kind.ROOTED)
        assert abs(float(em.mean - exact)) <= 4 * em.stderr

    def test_mean_is_exact_rational(self):
        em = empirical_expected_distance(4, Fraction(1, 3), Kind.ROOTED, 30, seed=1)
        assert isinstance(em.mean, Fraction) and isinstance(em.stderr_sq, Fraction)


class TestAddLeaf:
    def test_bijection_onto_unrooted_space(self):
        for n in (2, 3, 4, 5):
            images = {add_leaf(t).canonical_key()
                      for t in enumerate_phylogenies(n, Kind.ROOTED)}
            space = {t.canonical_key()
                     for t in enumerate_phylogenies(
                         n + 1, Kind.UNROOTED,
                         taxa=add_leaf(next(iter(
                             enumerate_phylogenies(n, Kind.ROOTED)))).taxa)}
            assert images == space
            assert len(images) == count_phylogenies(n, Kind.ROOTED)

    def test_preserves_resolution_of_canonical_subset(self):
        for t in enumerate_phylogenies(4, Kind.ROOTED):
            from polydist.trees import (QuartetTopology, TripletTopology,
                                        quartet_topology, triplet_topology)
            image = add_leaf(t)
            for X in itertools.combinations(range(4), 3):
                resolved_before = triplet_topology(t, X) is not TripletTopology.FAN
                resolved_after = quartet_topology(image, X + (4,)) is not QuartetTopology.STAR
                assert resolved_before == resolved_after

    def test_single_leaf(self):
        one = Phylogeny.rooted(("a",), "a")
        img = add_leaf(one, "b")
        assert img.kind is Kind.UNROOTED and img.n == 2
        assert img.validate() == []

    def test_rejects_unrooted_input(self):
        star = Phylogeny.unrooted("abcd", ("a", "b", "c", "d"))
        with pytest.raises(TreeError):
            add_leaf(star)


def test_asymptotic_unresolved():
    assert asymptotic_unresolved(100) == pytest.approx(
        (3.141592653589793 * (2 * 0.6931471805599453 - 1) / 400) ** 0.5)
    assert asymptotic_unresolved(400) == pytest.approx(
        asymptotic_unresolved(100) / 2)
    with pytest.raises(ValueError):
        asymptotic_unresolved(0)
