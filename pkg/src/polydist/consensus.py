"""Median consensus: profile distances, best-of-profile, greedy refinement.

The median of a profile under d^(p) is only computable exhaustively at toy
sizes, but two approximations have guarantees in the metric range:

* best_of_profile: the best profile member is a 2-approximate median for
  p in [1/2, 1] (triangle inequality argument).
* greedy_refine_median: repeatedly applies the refinement operation whose
  exact distance-change is best (Pull-Out for rooted trees, Pull-2-Out for
  unrooted).  For p >= 2/3 and a fully resolved profile, a non-worsening
  candidate always exists (votes split 1 agreeing : 2 disagreeing), so a
  fully resolved tree is reached without increasing the profile distance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from polydist.oracle import classify_quartets
from polydist.quartet import parametric_quartet_distance
from polydist.trees import (
    Kind,
    Phylogeny,
    QuartetTopology,
    TreeError,
    TripletTopology,
    pull_2_out,
    pull_out,
    quartet_topology,
    triplet_topology,
)
from polydist.triplet import parametric_triplet_distance


@dataclass(frozen=True)
class Profile:
    """A non-empty sequence of phylogenies over one taxon set, one kind."""

    trees: tuple[Phylogeny, ...]

    def __post_init__(self):
        if not self.trees:
            raise TreeError("empty profile")
        first = self.trees[0]
        for t in self.trees:
            if t.kind is not first.kind or t.taxa.labels != first.taxa.labels:
                raise TreeError("profile members must share kind and taxa")

    @property
    def k(self) -> int:
        return len(self.trees)

    @property
    def kind(self) -> Kind:
        return self.trees[0].kind

    @property
    def taxa(self):
        return self.trees[0].taxa


def _member_distance(tree: Phylogeny, member: Phylogeny, p: Fraction) -> Fraction:
    if tree.kind is Kind.ROOTED:
        return parametric_triplet_distance(tree, member).evaluate(p)
    if p == Fraction(1, 2):
        return parametric_quartet_distance(tree, member, p, mode="approx").value
    return classify_quartets(tree, member).to_distance_pair().evaluate(p)


def profile_distance(tree: Phylogeny, profile: Profile, p) -> Fraction:
    """Sum of exact d^(p)(tree, member) over the profile."""
    p = Fraction(p)
    if tree.kind is not profile.kind or tree.taxa.labels != profile.taxa.labels:
        raise TreeError("tree does not match the profile")
    return sum((_member_distance(tree, m, p) for m in profile.trees), Fraction(0))


@dataclass(frozen=True)
class BestOfProfile:
    tree: Phylogeny
    index: int
    total: Fraction
    certificate: str | None  # "2-approx" within the metric range, else None


def best_of_profile(profile: Profile, p) -> BestOfProfile:
    """The profile member closest to the whole profile (tie: lowest index)."""
    p = Fraction(p)
    best_i, best_total = 0, None
    for i, member in enumerate(profile.trees):
        total = profile_distance(member, profile, p)
        if best_total is None or total < best_total:
            best_i, best_total = i, total
    cert = "2-approx" if Fraction(1, 2) <= p <= 1 else None
    return BestOfProfile(profile.trees[best_i], best_i, best_total, cert)


# ---------------------------------------------------------------------------
# Vote tallies and the greedy refinement
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VoteTally:
    """Votes at one polytomy for one candidate refinement.

    f: members resolving an associated triplet/quartet compatibly with the
    candidate; a: incompatibly; nv: members leaving it unresolved.
    """

    f: int
    a: int
    nv: int

    def delta(self, p: Fraction) -> Fraction:
        """Exact change of the profile distance if the candidate is applied."""
        return -p * self.f + (1 - p) * self.a + p * self.nv


def _group_of(tree: Phylogeny, v: int, taxon: int) -> int:
    for c in tree.children[v]:
        if taxon in tree.subtree_taxa(c):
            return c
    return tree.parent[v]


def rooted_vote_tally(tree: Phylogeny, v: int, profile: Profile) -> dict[int, VoteTally]:
    """Votes per child q of polytomy v, over triplets with leaves in three
    distinct child groups, one of them the q group."""
    apart_of = {TripletTopology.A_BC: 0, TripletTopology.B_AC: 1, TripletTopology.C_AB: 2}
    counts: dict[int, list[int]] = {q: [0, 0, 0] for q in tree.children[v]}
    children = tree.children[v]
    taxa_by_child = [sorted(tree.subtree_taxa(c)) for c in children]
    for ga, gb, gc in itertools.combinations(range(len(children)), 3):
        for X in itertools.product(taxa_by_child[ga], taxa_by_child[gb], taxa_by_child[gc]):
            Xs = tuple(sorted(X))
            group = {x: children[g] for x, g in zip(X, (ga, gb, gc))}
            for member in profile.trees:
                top = triplet_topology(member, Xs)
                if top is TripletTopology.FAN:
                    for g in (ga, gb, gc):
                        counts[children[g]][2] += 1
                else:
                    apart = group[Xs[apart_of[top]]]
                    for g in (ga, gb, gc):
                        q = children[g]
                        counts[q][0 if q == apart else 1] += 1
    return {q: VoteTally(f, a, nv) for q, (f, a, nv) in counts.items()}


def unrooted_vote_tally(tree: Phylogeny, w: int, profile: Profile) -> dict[frozenset, VoteTally]:
    """Votes per unordered neighbor pair {q, r} of polytomy w, over quartets
    with leaves in four distinct neighbor groups, two of them q and r."""
    pair_of = {QuartetTopology.AB_CD: (0, 1), QuartetTopology.AC_BD: (0, 2),
               QuartetTopology.AD_BC: (0, 3)}
    nbrs = tree.neighbors(w)
    everything = set(range(tree.n))
    group_taxa = []
    for x in nbrs:
        if tree.parent[x] == w:
            group_taxa.append(sorted(tree.subtree_taxa(x)))
        else:
            group_taxa.append(sorted(everything - tree.subtree_taxa(w)))
    counts: dict[frozenset, list[int]] = {
        frozenset(pr): [0, 0, 0] for pr in itertools.combinations(nbrs, 2)}
    for gs in itertools.combinations(range(len(nbrs)), 4):
        for X in itertools.product(*(group_taxa[g] for g in gs)):
            Xs = tuple(sorted(X))
            group = {x: nbrs[g] for x, g in zip(X, gs)}
            pairs_here = [frozenset((nbrs[ga], nbrs[gb]))
                          for ga, gb in itertools.combinations(gs, 2)]
            for member in profile.trees:
                top = quartet_topology(member, Xs)
                if top is QuartetTopology.STAR:
                    for pr in pairs_here:
                        counts[pr][2] += 1
                    continue
                i, j = pair_of[top]
                mate = frozenset((group[Xs[i]], group[Xs[j]]))
                other = frozenset(set(group[x] for x in Xs) - mate)
                for pr in pairs_here:
                    counts[pr][0 if pr in (mate, other) else 1] += 1
    return {pr: VoteTally(f, a, nv) for pr, (f, a, nv) in counts.items()}


@dataclass(frozen=True)
class GreedyResult:
    tree: Phylogeny
    initial_distance: Fraction
    final_distance: Fraction
    guaranteed: bool  # non-increase certified (p >= 2/3, fully resolved profile)
    steps: int


def greedy_refine_median(tree: Phylogeny, profile: Profile, p) -> GreedyResult:
    """Refine `tree` to full resolution, greedily minimizing the exact
    distance change at each step (tie: lexicographically smallest candidate)."""
    p = Fraction(p)
    if tree.kind is not profile.kind or tree.taxa.labels != profile.taxa.labels:
        raise TreeError("tree does not match the profile")
    initial = profile_distance(tree, profile, p)
    current = tree
    steps = 0
    while True:
        polytomies = current.unresolved_nodes()
        if not polytomies:
            break
        best_key = None
        best_delta = None
        best_apply = None
        if current.kind is Kind.ROOTED:
            for v in polytomies:
                for q, tally in rooted_vote_tally(current, v, profile).items():
                    delta = tally.delta(p)
                    key = (v, q)
                    if best_delta is None or delta < best_delta or \
                            (delta == best_delta and key < best_key):
                        best_key, best_delta = key, delta
                        best_apply = (pull_out, (q,))
        else:
            for w in polytomies:
                for pr, tally in unrooted_vote_tally(current, w, profile).items():
                    delta = tally.delta(p)
                    key = (w, tuple(sorted(pr)))
                    if best_delta is None or delta < best_delta or \
                            (delta == best_delta and key < best_key):
                        best_key, best_delta = key, delta
                        best_apply = (pull_2_out, tuple(sorted(pr)))
        fn, args = best_apply
        current = fn(current, *args)
        steps += 1
    final = profile_distance(current, profile, p)
    guaranteed = p >= Fraction(2, 3) and all(m.is_fully_resolved() for m in profile.trees)
    return GreedyResult(current, initial, final, guaranteed, steps)
