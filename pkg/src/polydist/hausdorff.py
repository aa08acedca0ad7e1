"""Bounds on the Hausdorff distance between full-refinement sets.

The Hausdorff triplet (quartet) distance compares the sets of full
refinements of two partially resolved trees under the |D| metric on fully
resolved trees.  Exact computation is delegated to the oracle (and
suspected to be hard); this module provides certified bounds:

    lower = |D| + (2/3) * max(|R1|, |R2|)
    upper = |D| + |R1| + |R2| + |U|

plus the constructive step behind the lower bound: an adversarial
refinement of T1 that turns at least two thirds of R2 into disagreements,
and the certificate that the Hausdorff and parametric distances are
equivalent up to factor 3 + 3*beta whenever |U| <= beta(|D|+|R1|+|R2|).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from polydist.oracle import Classification, classify, classify_quartets
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
from polydist.triplet import build_tables, count_R_U, count_r1, count_shared


@dataclass(frozen=True)
class HausdorffBounds:
    lower: Fraction
    upper: int
    components: Classification

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("invalid bounds")


def classification_counts(t1: Phylogeny, t2: Phylogeny) -> Classification:
    """Five-set counts: O(n^2) triplet path for rooted, oracle for unrooted."""
    if t1.kind is Kind.UNROOTED:
        return classify_quartets(t1, t2)
    if t1.taxa.labels != t2.taxa.labels:
        raise TreeError("trees are over different taxon sets")
    from math import comb
    n = t1.n
    if n < 3:
        return Classification(0, 0, 0, 0, 0)
    tables = build_tables(t1, t2)
    R1tree, _ = count_R_U(t1)
    s = count_shared(tables)
    r1 = count_r1(tables)
    r2 = count_r1(build_tables(t2, t1))
    d = R1tree - s - r1
    u = comb(n, 3) - s - d - r1 - r2
    return Classification(s, d, r1, r2, u)


def hausdorff_bounds(t1: Phylogeny, t2: Phylogeny) -> HausdorffBounds:
    c = classification_counts(t1, t2)
    lower = Fraction(c.d) + Fraction(2, 3) * max(c.r1, c.r2)
    upper = c.d + c.r1 + c.r2 + c.u
    return HausdorffBounds(lower, upper, c)


# ---------------------------------------------------------------------------
# Adversarial refinement
# ---------------------------------------------------------------------------

def _group_of(tree: Phylogeny, v: int, taxon: int) -> int:
    """The neighbor of v whose side contains `taxon` (v not the leaf itself)."""
    for c in tree.children[v]:
        if taxon in tree.subtree_taxa(c):
            return c
    return tree.parent[v]


def _rooted_votes(t1: Phylogeny, t2: Phylogeny):
    """Per (polytomy v, child q) of t1: F (T2 agrees with pulling q out)
    and A (T2 disagrees), over triplets resolved in t2, unresolved in t1."""
    F: dict = {}
    A: dict = {}
    node1, _ = t1.leaf_lca_tables()
    unresolved = set(t1.unresolved_nodes())
    apart_of = {TripletTopology.A_BC: 0, TripletTopology.B_AC: 1, TripletTopology.C_AB: 2}
    for X in itertools.combinations(range(t1.n), 3):
        if triplet_topology(t1, X) is not TripletTopology.FAN:
            continue
        top2 = triplet_topology(t2, X)
        if top2 is TripletTopology.FAN:
            continue
        v = node1[X[0]][X[1]]  # the associated polytomy: all pairwise LCAs agree
        assert v in unresolved
        groups = [_group_of(t1, v, x) for x in X]
        apart_group = groups[apart_of[top2]]
        for g in set(groups):
            key = (v, g)
            if g == apart_group:
                F[key] = F.get(key, 0) + 1
            else:
                A[key] = A.get(key, 0) + 1
    return F, A


def _unrooted_votes(t1: Phylogeny, t2: Phylogeny):
    """Per (polytomy w, neighbor pair {q,r}) of t1: F/A over quartets
    resolved in t2, unresolved in t1."""
    F: dict = {}
    A: dict = {}
    pair_of = {QuartetTopology.AB_CD: (0, 1), QuartetTopology.AC_BD: (0, 2),
               QuartetTopology.AD_BC: (0, 3)}
    node1, dep1 = t1.leaf_lca_tables()

    def median(x, y, z):
        best, bd = node1[x][y], dep1[x][y]
        for u, v in ((x, z), (y, z)):
            if dep1[u][v] > bd:
                best, bd = node1[u][v], dep1[u][v]
        return best

    unresolved = set(t1.unresolved_nodes())
    for X in itertools.combinations(range(t1.n), 4):
        if quartet_topology(t1, X) is not QuartetTopology.STAR:
            continue
        top2 = quartet_topology(t2, X)
        if top2 is QuartetTopology.STAR:
            continue
        w = median(X[0], X[1], X[2])
        if w not in unresolved:
            continue  # star by coincidence of shallow medians cannot happen
        groups = [_group_of(t1, w, x) for x in X]
        if len(set(groups)) != 4:
            continue
        i, j = pair_of[top2]
        agree_pairs = {frozenset((groups[i], groups[j])),
                       frozenset(set(groups) - {groups[i], groups[j]})}
        for q, r in itertools.combinations(sorted(set(groups)), 2):
            key = (w, frozenset((q, r)))
            if frozenset((q, r)) in agree_pairs:
                F[key] = F.get(key, 0) + 1
            else:
                A[key] = A.get(key, 0) + 1
    return F, A


@dataclass(frozen=True)
class AdversarialResult:
    refined: Phylogeny
    d_initial: int
    r2_initial: int
    d_achieved: int

    @property
    def certified_lower(self) -> Fraction:
        return Fraction(self.d_initial) + Fraction(2, 3) * self.r2_initial


def adversarial_refinement(t1: Phylogeny, t2: Phylogeny) -> AdversarialResult:
    """Refine t1 so that no triplet/quartet stays resolved only in t2.

    Each step pulls out a group with disagreement votes A >= 2F (one always
    exists because every vote set splits 1 agreeing : 2 disagreeing), so the
    achieved disagreement count is >= |D| + (2/3)|R2| of the input pair.
    """
    start = classify(t1, t2)
    current = t1
    while True:
        c = classify(current, t2)
        if c.r2 == 0:
            break
        if current.kind is Kind.ROOTED:
            F, A = _rooted_votes(current, t2)
            candidates = sorted(set(F) | set(A))
            best = max(candidates,
                       key=lambda k: (A.get(k, 0) - 2 * F.get(k, 0), [-x for x in k]))
            if A.get(best, 0) - 2 * F.get(best, 0) < 0:
                # guaranteed not to happen; guard against silent looping
                raise AssertionError("no admissible pull-out candidate")
            v, q = best
            current = pull_out(current, q)
        else:
            F, A = _unrooted_votes(current, t2)
            candidates = sorted(set(F) | set(A), key=lambda k: (k[0], sorted(k[1])))
            best = max(candidates,
                       key=lambda k: (A.get(k, 0) - 2 * F.get(k, 0),
                                      [-k[0]] + [-x for x in sorted(k[1])]))
            if A.get(best, 0) - 2 * F.get(best, 0) < 0:
                raise AssertionError("no admissible pull-2-out candidate")
            w, pair = best
            q, r = sorted(pair)
            current = pull_2_out(current, q, r)
    final = classify(current, t2)
    return AdversarialResult(current, start.d, start.r2, final.d)


# ---------------------------------------------------------------------------
# Equivalence certificate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivalenceCertificate:
    holds: bool
    beta: Fraction
    factor: Fraction | None
    components: Classification


def equivalence_certificate(t1: Phylogeny, t2: Phylogeny, beta) -> EquivalenceCertificate:
    """True iff |U| <= beta(|D|+|R1|+|R2|); then Hausdorff and parametric
    distances are equivalent up to the factor 3 + 3*beta."""
    beta = Fraction(beta)
    if beta <= 0:
        raise ValueError("beta must be positive")
    c = classification_counts(t1, t2)
    holds = Fraction(c.u) <= beta * (c.d + c.r1 + c.r2)
    factor = 3 + 3 * beta if holds else None
    return EquivalenceCertificate(holds, beta, factor, c)
