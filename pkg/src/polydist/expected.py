"""Tree-space statistics: resolution probabilities and expected distances.

Over all phylogenies on n taxa drawn uniformly (with replacement), the
expected parametric distance has a closed form in the probability r that a
fixed triplet/quartet is resolved:

    E[d^(p)] = C(n,3) * ((2/3) r'(n)^2 + 2 p r'(n) u'(n))   (rooted)
    E[d^(p)] = C(n,4) * ((2/3) r(n)^2  + 2 p r(n) u(n))     (unrooted)

with u = 1 - r.  The rooted and unrooted probabilities are linked by
r'(n) = r(n+1) through the Add-Leaf bijection (attach a new leaf to the
root, then forget the rooting), which maps rooted trees on n taxa onto
unrooted trees on n+1 taxa and preserves resolution of the corresponding
triplet/quartet.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from polydist.oracle import classify, enumerate_phylogenies
from polydist.trees import Kind, Phylogeny, QuartetTopology, TaxonSet, TreeError, \
    TripletTopology, quartet_topology, triplet_topology


@dataclass(frozen=True)
class ResolutionStats:
    n: int
    kind: Kind
    trees_total: int
    resolved_count: int
    r: Fraction

    @property
    def u(self) -> Fraction:
        return 1 - self.r


def exact_resolution_probability(n: int, kind: Kind, cap: int | None = None,
                                 resolved_only: bool = False) -> ResolutionStats:
    """Exact probability that the canonical triplet {0,1,2} (rooted) or
    quartet {0,1,2,3} (unrooted) is resolved in a uniform tree.

    Exchangeability of taxa makes the canonical choice representative.
    """
    need = 3 if kind is Kind.ROOTED else 4
    if n < need:
        raise TreeError(f"n must be >= {need} for {kind.value} resolution stats")
    subset = tuple(range(need))
    total = 0
    resolved = 0
    for t in enumerate_phylogenies(n, kind, cap=cap):
        if resolved_only and not t.is_fully_resolved():
            continue
        total += 1
        if kind is Kind.ROOTED:
            ok = triplet_topology(t, subset) is not TripletTopology.FAN
        else:
            ok = quartet_topology(t, subset) is not QuartetTopology.STAR
        resolved += ok
    return ResolutionStats(n, kind, total, resolved, Fraction(resolved, total))


def expected_distance_formula(n: int, p, kind: Kind, cap: int | None = None) -> Fraction:
    """Exact expected d^(p) between two uniform trees on n taxa."""
    p = Fraction(p)
    if kind is Kind.ROOTED:
        stats = exact_resolution_probability(n, Kind.ROOTED, cap=cap)
        per = comb(n, 3)
    else:
        stats = exact_resolution_probability(n, Kind.UNROOTED, cap=cap)
        per = comb(n, 4)
    r, u = stats.r, stats.u
    return per * (Fraction(2, 3) * r * r + 2 * p * r * u)


@dataclass(frozen=True)
class EmpiricalMean:
    mean: Fraction
    stderr_sq: Fraction  # sample variance of the mean, exact
    samples: int
    seed: int

    @property
    def stderr(self) -> float:
        return math.sqrt(self.stderr_sq)


def empirical_expected_distance(n: int, p, kind: Kind, samples: int,
                                seed: int, cap: int | None = None) -> EmpiricalMean:
    """Seeded mean of d^(p) over uniformly sampled tree pairs (exact uniform
    sampling by indexing the full enumeration)."""
    p = Fraction(p)
    space = list(enumerate_phylogenies(n, kind, cap=cap))
    rng = random.Random(seed)
    total = Fraction(0)
    total_sq = Fraction(0)
    cache: dict[tuple[int, int], Fraction] = {}
    for _ in range(samples):
        i = rng.randrange(len(space))
        j = rng.randrange(len(space))
        d = cache.get((i, j))
        if d is None:
            d = classify(space[i], space[j]).to_distance_pair().evaluate(p)
            cache[(i, j)] = cache[(j, i)] = d
        total += d
        total_sq += d * d
    mean = total / samples
    var = (total_sq / samples - mean * mean) * samples / max(samples - 1, 1)
    return EmpiricalMean(mean, var / samples, samples, seed)


def add_leaf(tree: Phylogeny, label: str | None = None) -> Phylogeny:
    """Attach a new leaf to the root and forget the rooting.

    This is a bijection from rooted trees on n taxa to unrooted trees on
    n+1 taxa; a triplet X is resolved in the input exactly when the quartet
    X + {new leaf} is resolved in the output.
    """
    if tree.kind is not Kind.ROOTED:
        raise TreeError("add_leaf applies to rooted trees")
    if label is None:
        label = f"t{tree.n}"
    taxa = TaxonSet(tree.taxa.labels + (label,))
    m = tree.num_nodes
    children = [list(cs) for cs in tree.children]
    leaf_taxon = list(tree.leaf_taxon) + [taxa.n - 1]
    if tree.is_leaf(tree.root):
        # n = 1: the result is the two-leaf edge
        return Phylogeny(Kind.UNROOTED, taxa, [[], [], [0, 1]], 2,
                         [tree.leaf_taxon[0], taxa.n - 1, None])
    children[tree.root].append(m)
    children.append([])
    return Phylogeny(Kind.UNROOTED, taxa, children, tree.root, leaf_taxon)


def asymptotic_unresolved(n: int) -> float:
    """Asymptotic probability that a fixed quartet is unresolved in a
    uniform tree: sqrt(pi(2 ln 2 - 1)/(4n)).  Documentation-grade float;
    the only floating-point quantity in the package."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.sqrt(math.pi * (2 * math.log(2) - 1) / (4 * n))
