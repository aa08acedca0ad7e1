import pytest
from hypothesis import given, settings

from conftest import rooted_trees, unrooted_trees
from polydist.trees import (
    Kind,
    Phylogeny,
    QuartetTopology,
    TaxonSet,
    TreeError,
    TripletTopology,
    contract,
    is_refinement,
    pull_2_out,
    pull_out,
    quartet_topology,
    restrict,
    topology_by_restriction,
    triplet_topology,
)


def test_taxon_set_rejects_duplicates_and_empties():
    with pytest.raises(TreeError):
        TaxonSet(("a", "a"))
    with pytest.raises(TreeError):
        TaxonSet(("a", ""))
    with pytest.raises(TreeError):
        TaxonSet(())


def test_basic_shape_accessors():
    t = Phylogeny.rooted("abcd", (("a", "b"), "c", "d"))
    assert t.n == 4
    assert sorted(t.leaf_taxon[v] for v in t.leaves()) == [0, 1, 2, 3]
    assert t.unresolved_nodes() == [t.root]
    assert not t.is_fully_resolved()
    b = Phylogeny.rooted("abcd", ((("a", "b"), "c"), "d"))
    assert b.is_fully_resolved()


def test_validate_flags_problems():
    # hand-built node arrays with unary internal nodes and a missing taxon
    taxa = TaxonSet(("a", "b"))
    t = Phylogeny(Kind.ROOTED, taxa, [[1], [2], []], 0, [None, None, 0])
    assert t.validate() != []
    # inconsistent arrays are rejected outright
    with pytest.raises(TreeError):
        Phylogeny(Kind.ROOTED, taxa, [[1, 2], [], [1]], 0, [None, 0, 1])


def test_unrooted_degree_rule():
    t = Phylogeny.unrooted("abcd", ("a", "b", "c", "d"))
    assert t.validate() == []
    assert t.is_unresolved(t.root)
    bin4 = Phylogeny.unrooted("abcd", (("a", "b"), "c", "d"))
    assert bin4.is_fully_resolved()


def test_triplet_topologies():
    t = Phylogeny.rooted("abc", (("a", "b"), "c"))
    assert triplet_topology(t, ("a", "b", "c")) is TripletTopology.C_AB
    t = Phylogeny.rooted("abc", (("a", "c"), "b"))
    assert triplet_topology(t, ("a", "b", "c")) is TripletTopology.B_AC
    fan = Phylogeny.rooted("abc", ("a", "b", "c"))
    assert triplet_topology(fan, ("a", "b", "c")) is TripletTopology.FAN


def test_quartet_topologies():
    t = Phylogeny.unrooted("abcd", (("a", "b"), "c", "d"))
    assert quartet_topology(t, "abcd") is QuartetTopology.AB_CD
    t = Phylogeny.unrooted("abcd", (("a", "c"), "b", "d"))
    assert quartet_topology(t, "abcd") is QuartetTopology.AC_BD
    star = Phylogeny.unrooted("abcd", ("a", "b", "c", "d"))
    assert quartet_topology(star, "abcd") is QuartetTopology.STAR


def test_restrict_small_cases():
    t = Phylogeny.rooted("abcde", ((("a", "b"), "c"), ("d", "e")))
    sub = restrict(t, ("a", "d", "e"))
    assert sub.taxa.labels == ("a", "d", "e")
    assert triplet_topology(sub, (0, 1, 2)) is TripletTopology.A_BC
    # unrooted restriction that forces handle splicing
    u = Phylogeny.unrooted("abcdef", ((("a", "b"), "c"), ("d", "e"), "f"))
    sub = restrict(u, ("a", "b", "d", "e"))
    assert sub.validate() == []
    assert quartet_topology(sub, (0, 1, 2, 3)) is QuartetTopology.AB_CD


@given(rooted_trees())
@settings(max_examples=60, deadline=None)
def test_topology_agrees_with_restriction_route(tree):
    import itertools
    for X in itertools.islice(itertools.combinations(range(tree.n), 3), 25):
        assert triplet_topology(tree, X) is topology_by_restriction(tree, X)


@given(unrooted_trees())
@settings(max_examples=40, deadline=None)
def test_quartet_topology_agrees_with_restriction_route(tree):
    import itertools
    for X in itertools.islice(itertools.combinations(range(tree.n), 4), 25):
        assert quartet_topology(tree, X) is topology_by_restriction(tree, X)


def test_pull_out_and_contract_are_inverse_in_shape():
    fan = Phylogeny.rooted("abcd", ("a", "b", "c", "d"))
    child_a = next(c for c in fan.children[fan.root] if fan.leaf_taxon[c] == 0)
    pulled = pull_out(fan, child_a)
    assert pulled.validate() == []
    assert is_refinement(fan, pulled)
    assert not is_refinement(pulled, fan)
    # contracting the fresh internal edge restores the fan
    new_internal = next(v for v in pulled.internal_nodes() if v != pulled.root)
    back = contract(pulled, new_internal)
    assert back.isomorphic(fan)


def test_pull_out_requires_wide_parent():
    t = Phylogeny.rooted("abc", (("a", "b"), "c"))
    with pytest.raises(TreeError):
        pull_out(t, t.children[t.root][0])


def test_pull_2_out():
    star = Phylogeny.unrooted("abcde", tuple("abcde"))
    q, r = star.children[star.root][:2]
    out = pull_2_out(star, q, r)
    assert out.validate() == []
    assert is_refinement(star, out)
    assert quartet_topology(out, (0, 1, 2, 3)) is QuartetTopology.AB_CD
    with pytest.raises(TreeError):
        pull_2_out(out, 0, 1)  # shared neighbor now has degree 3


def test_refinement_partial_order():
    fan = Phylogeny.rooted("abcd", ("a", "b", "c", "d"))
    mid = Phylogeny.rooted("abcd", (("a", "b"), "c", "d"))
    top = Phylogeny.rooted("abcd", ((("a", "b"), "c"), "d"))
    other = Phylogeny.rooted("abcd", ((("a", "c"), "b"), "d"))
    assert is_refinement(fan, mid) and is_refinement(mid, top)
    assert is_refinement(fan, top)
    assert not is_refinement(mid, other)
    assert not is_refinement(top, mid)


def test_canonical_key_is_label_sensitive():
    t1 = Phylogeny.rooted("abc", (("a", "b"), "c"))
    t2 = Phylogeny.rooted("abc", (("c", "b"), "a"))
    t3 = Phylogeny.rooted("abc", (("b", "a"), "c"))
    assert not t1.isomorphic(t2)
    assert t1.isomorphic(t3)


def test_unrooted_isomorphism_ignores_handle_placement():
    a = Phylogeny.unrooted("abcd", (("a", "b"), "c", "d"))
    b = Phylogeny.unrooted("abcd", (("c", "d"), "a", "b"))
    assert a.isomorphic(b)


@given(rooted_trees())
@settings(max_examples=50, deadline=None)
def test_subtree_sizes_sum(tree):
    alpha = tree.subtree_sizes()
    assert alpha[tree.root] == tree.n
    for v in tree.internal_nodes():
        assert alpha[v] == sum(alpha[c] for c in tree.children[v])
