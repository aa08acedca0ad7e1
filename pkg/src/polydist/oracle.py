"""Brute-force reference implementations.

Everything here is ground truth for the fast algorithms: triplet/quartet
classification by direct enumeration, exhaustive tree-space enumeration,
full-refinement enumeration, exact Hausdorff distance, and exhaustive
median search.  Counts are exact integers; distances are exact rationals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np

from polydist.newick import write_newick
from polydist.trees import (
    Kind,
    Phylogeny,
    QuartetTopology,
    TaxonSet,
    TreeError,
    TripletTopology,
    quartet_topology,
    triplet_topology,
)

ROOTED_ENUM_CAP = 7
UNROOTED_ENUM_CAP = 8


class CapacityError(RuntimeError):
    """Predicted enumeration size exceeds the configured cap."""


@dataclass(frozen=True)
class DistancePair:
    """Exact parametric distance d^(p) = d_count + p * r_count."""

    d_count: int
    r_count: int

    def evaluate(self, p) -> Fraction:
        p = Fraction(p)
        if not 0 <= p <= 1:
            raise ValueError(f"p must lie in [0, 1], got {p}")
        return Fraction(self.d_count) + p * self.r_count


@dataclass(frozen=True)
class Classification:
    """Counts of the five triplet/quartet classes between two trees.

    s: resolved the same in both; d: resolved differently; r1: resolved
    only in the first tree; r2: only in the second; u: unresolved in both.
    """

    s: int
    d: int
    r1: int
    r2: int
    u: int
    members: dict | None = field(default=None, compare=False)

    @property
    def total(self) -> int:
        return self.s + self.d + self.r1 + self.r2 + self.u

    def to_distance_pair(self) -> DistancePair:
        return DistancePair(self.d, self.r1 + self.r2)

    def swapped(self) -> "Classification":
        return Classification(self.s, self.d, self.r2, self.r1, self.u)


def _check_comparable(t1: Phylogeny, t2: Phylogeny, kind: Kind):
    if t1.kind is not kind or t2.kind is not kind:
        raise TreeError(f"both trees must be {kind.value}")
    if t1.taxa.labels != t2.taxa.labels:
        raise TreeError("trees are over different taxon sets")


def _triplet_codes(tree: Phylogeny, combos: np.ndarray) -> np.ndarray:
    """Topology code per sorted triplet row: 0=a|bc, 1=b|ac, 2=c|ab, 3=fan."""
    _, dep = tree.leaf_lca_tables()
    d = np.asarray(dep, dtype=np.int64)
    a, b, c = combos[:, 0], combos[:, 1], combos[:, 2]
    stacked = np.stack([d[b, c], d[a, c], d[a, b]])  # deepest pair leaves x apart
    codes = np.argmax(stacked, axis=0).astype(np.int8)
    fan = (stacked[0] == stacked[1]) & (stacked[1] == stacked[2])
    codes[fan] = 3
    return codes


def _quartet_codes(tree: Phylogeny, combos: np.ndarray) -> np.ndarray:
    """Topology code per sorted quartet row: 0=ab|cd, 1=ac|bd, 2=ad|bc, 3=star.

    Uses the median trick: med(x,y,z) is the deepest of the three pairwise
    LCAs; the quartet is ab|cd iff med(a,b,c) == med(a,b,d).
    """
    node_l, dep_l = tree.leaf_lca_tables()
    node = np.asarray(node_l, dtype=np.int64)
    dep = np.asarray(dep_l, dtype=np.int64)
    a, b, c, d = combos[:, 0], combos[:, 1], combos[:, 2], combos[:, 3]

    def median(x, y, z):
        depths = np.stack([dep[x, y], dep[x, z], dep[y, z]])
        nodes = np.stack([node[x, y], node[x, z], node[y, z]])
        return np.take_along_axis(nodes, np.argmax(depths, axis=0)[None, :], 0)[0]

    m1 = median(a, b, c)
    m2 = median(a, b, d)
    m3 = median(a, c, d)
    codes = np.full(len(combos), 2, dtype=np.int8)
    codes[m1 == m2] = 0
    codes[m1 == m3] = 1
    codes[(m1 == m2) & (m1 == m3)] = 3
    return codes


def _classify_codes(codes1: np.ndarray, codes2: np.ndarray, star: int) -> tuple:
    res1 = codes1 != star
    res2 = codes2 != star
    s = int(np.count_nonzero(res1 & res2 & (codes1 == codes2)))
    d = int(np.count_nonzero(res1 & res2 & (codes1 != codes2)))
    r1 = int(np.count_nonzero(res1 & ~res2))
    r2 = int(np.count_nonzero(~res1 & res2))
    u = int(np.count_nonzero(~res1 & ~res2))
    return s, d, r1, r2, u


def classify_triplets(t1: Phylogeny, t2: Phylogeny, listing: bool = False) -> Classification:
    """Classify all C(n,3) triplets of two rooted trees by direct enumeration."""
    _check_comparable(t1, t2, Kind.ROOTED)
    n = t1.n
    combos = np.array(list(itertools.combinations(range(n), 3)), dtype=np.int64) \
        if n >= 3 else np.empty((0, 3), dtype=np.int64)
    c1 = _triplet_codes(t1, combos) if len(combos) else np.empty(0, dtype=np.int8)
    c2 = _triplet_codes(t2, combos) if len(combos) else np.empty(0, dtype=np.int8)
    s, d, r1, r2, u = _classify_codes(c1, c2, star=3)
    members = None
    if listing:
        members = _list_members(combos, c1, c2, star=3)
    return Classification(s, d, r1, r2, u, members)


def classify_quartets(t1: Phylogeny, t2: Phylogeny, listing: bool = False) -> Classification:
    """Classify all C(n,4) quartets of two unrooted trees by direct enumeration."""
    _check_comparable(t1, t2, Kind.UNROOTED)
    n = t1.n
    combos = np.array(list(itertools.combinations(range(n), 4)), dtype=np.int64) \
        if n >= 4 else np.empty((0, 4), dtype=np.int64)
    c1 = _quartet_codes(t1, combos) if len(combos) else np.empty(0, dtype=np.int8)
    c2 = _quartet_codes(t2, combos) if len(combos) else np.empty(0, dtype=np.int8)
    s, d, r1, r2, u = _classify_codes(c1, c2, star=3)
    members = None
    if listing:
        members = _list_members(combos, c1, c2, star=3)
    return Classification(s, d, r1, r2, u, members)


def _list_members(combos, c1, c2, star):
    members = {"s": [], "d": [], "r1": [], "r2": [], "u": []}
    for row, a, b in zip(combos.tolist(), c1.tolist(), c2.tolist()):
        if a != star and b != star:
            members["s" if a == b else "d"].append(tuple(row))
        elif a != star:
            members["r1"].append(tuple(row))
        elif b != star:
            members["r2"].append(tuple(row))
        else:
            members["u"].append(tuple(row))
    return members


def classify(t1: Phylogeny, t2: Phylogeny, listing: bool = False) -> Classification:
    if t1.kind is Kind.ROOTED:
        return classify_triplets(t1, t2, listing)
    return classify_quartets(t1, t2, listing)


# Slow single-subset classification, kept as a second independent route for
# cross-checking the vectorized LCA/median codes in tests.
def triplet_topology_slow(tree: Phylogeny, triplet) -> TripletTopology:
    from polydist.trees import topology_by_restriction
    return topology_by_restriction(tree, triplet)


def quartet_topology_slow(tree: Phylogeny, quartet) -> QuartetTopology:
    from polydist.trees import topology_by_restriction
    return topology_by_restriction(tree, quartet)


# ---------------------------------------------------------------------------
# Tree-space enumeration
# ---------------------------------------------------------------------------

def _nested_rooted(n: int):
    """All rooted phylogenies over taxa 0..n-1 as nested tuples, each once.

    Leaf n-1 is inserted into each smaller tree at every edge, at every
    internal node, and as a sibling of the root; deleting that leaf again
    inverts every insertion uniquely, so no deduplication is needed.
    """
    if n == 1:
        yield 0
        return
    new = n - 1
    for base in _nested_rooted(n - 1):
        # as sibling of the old root
        yield (base, new)

        def variants(node):
            # insert below this node: at each child edge or as a new child
            if isinstance(node, int):
                return
            kids = list(node)
            for i, c in enumerate(kids):
                # subdivide the edge to child i
                yield tuple(kids[:i] + [(c, new)] + kids[i + 1:])
                for sub in variants(c):
                    yield tuple(kids[:i] + [sub] + kids[i + 1:])
            # widen this node
            yield tuple(kids + [new])

        yield from variants(base)


def _nested_unrooted(n: int):
    """All unrooted phylogenies over taxa 0..n-1 as handle-rooted nested tuples."""
    if n == 1:
        yield 0
        return
    if n == 2:
        yield (0, 1)
        return
    if n == 3:
        yield (0, 1, 2)
        return
    new = n - 1
    for base in _nested_unrooted(n - 1):

        def variants(node):
            if isinstance(node, int):
                return
            kids = list(node)
            for i, c in enumerate(kids):
                yield tuple(kids[:i] + [(c, new)] + kids[i + 1:])
                for sub in variants(c):
                    yield tuple(kids[:i] + [sub] + kids[i + 1:])
            yield tuple(kids + [new])

        yield from variants(base)


def enumerate_phylogenies(n: int, kind: Kind, taxa: TaxonSet | None = None,
                          cap: int | None = None):
    """Yield every phylogeny on n taxa exactly once (generator)."""
    limit = cap if cap is not None else (
        ROOTED_ENUM_CAP if kind is Kind.ROOTED else UNROOTED_ENUM_CAP)
    if n < 1:
        raise TreeError("n must be >= 1")
    if n > limit:
        raise CapacityError(f"enumeration for n={n} exceeds cap {limit}")
    if taxa is None:
        taxa = TaxonSet(tuple(f"t{i}" for i in range(n)))
    gen = _nested_rooted(n) if kind is Kind.ROOTED else _nested_unrooted(n)
    make = Phylogeny.rooted if kind is Kind.ROOTED else Phylogeny.unrooted
    for nested in gen:
        yield make(taxa, nested)


def count_phylogenies(n: int, kind: Kind, resolved_only: bool = False,
                      cap: int | None = None) -> int:
    total = 0
    for t in enumerate_phylogenies(n, kind, cap=cap):
        if not resolved_only or t.is_fully_resolved():
            total += 1
    return total


# ---------------------------------------------------------------------------
# Full refinements
# ---------------------------------------------------------------------------

def _double_factorial(k: int) -> int:
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def count_full_refinements(tree: Phylogeny) -> int:
    """Product of (2d-3)!! over rooted polytomies ((2d-5)!! unrooted)."""
    total = 1
    for v in tree.unresolved_nodes():
        if tree.kind is Kind.ROOTED:
            parts = len(tree.children[v])
        else:
            parts = tree.degree(v) - 1  # local shapes counted in rooted form
        total *= _double_factorial(2 * parts - 3)
    return total


def _binary_shapes_idx(k: int):
    """All rooted binary trees over atoms 0..k-1 (sequential edge insertion)."""
    if k == 1:
        yield 0
        return
    if k == 2:
        yield (0, 1)
        return
    last = k - 1
    for base in _binary_shapes_idx(k - 1):
        yield (base, last)

        def variants(node):
            if not isinstance(node, tuple):
                return
            a, b = node
            yield ((a, last), b)
            yield (a, (b, last))
            for sub in variants(a):
                yield (sub, b)
            for sub in variants(b):
                yield (a, sub)

        yield from variants(base)


def _binary_shapes(parts: list):
    """All rooted binary trees over the given parts, each part kept atomic."""

    def subst(node):
        if isinstance(node, tuple):
            return (subst(node[0]), subst(node[1]))
        return parts[node]

    for shape in _binary_shapes_idx(len(parts)):
        yield subst(shape)


def _expand_rooted(node):
    """All full refinements of a nested rooted tree (generator of nested)."""
    if not isinstance(node, tuple):
        yield node
        return
    child_gens = [list(_expand_rooted(c)) for c in node]
    for combo in itertools.product(*child_gens):
        if len(combo) <= 2:
            yield tuple(combo)
        else:
            yield from _binary_shapes(list(combo))


def _to_nested(tree: Phylogeny, start: int, banned: int):
    """Nested tuple of taxon indices for the subtree at `start`, avoiding `banned`."""
    t = tree.leaf_taxon[start]
    if t is not None:
        return t
    return tuple(_to_nested(tree, w, start) for w in tree.neighbors(start) if w != banned)


def enumerate_full_refinements(tree: Phylogeny, cap: int = 100_000) -> list[Phylogeny]:
    """All fully resolved refinements of `tree` (each exactly once)."""
    predicted = count_full_refinements(tree)
    if predicted > cap:
        raise CapacityError(f"{predicted} full refinements exceed cap {cap}")
    taxa = tree.taxa
    if tree.kind is Kind.ROOTED:
        nested = _to_nested(tree, tree.root, -1)
        return [Phylogeny.rooted(taxa, r) for r in _expand_rooted(nested)]
    if tree.n <= 3:
        return [tree]
    # Root at the neighbor of taxon 0's leaf with that leaf removed, refine
    # the rooted tree, then hang leaf 0 back on the refined root.
    leaf0 = tree.leaf_of_taxon(0)
    anchor = tree.neighbors(leaf0)[0]
    nested = _to_nested(tree, anchor, leaf0)
    out = []
    for r in _expand_rooted(nested):
        out.append(Phylogeny.unrooted(taxa, (r[0], r[1], 0)))
    return out


# ---------------------------------------------------------------------------
# Exact Hausdorff distance and exhaustive median
# ---------------------------------------------------------------------------

def hausdorff_exact(t1: Phylogeny, t2: Phylogeny, cap: int = 4_000_000) -> int:
    """Hausdorff distance between the full-refinement sets of t1 and t2.

    The inner distance between fully resolved trees is |D| (the number of
    differently resolved triplets/quartets).
    """
    _check_comparable(t1, t2, t1.kind)
    n1 = count_full_refinements(t1)
    n2 = count_full_refinements(t2)
    if n1 * n2 > cap:
        raise CapacityError(f"{n1}x{n2} refinement pairs exceed cap {cap}")
    f1 = enumerate_full_refinements(t1, cap)
    f2 = enumerate_full_refinements(t2, cap)
    dist = [[classify(a, b).d for b in f2] for a in f1]
    forward = max(min(row) for row in dist)
    backward = max(min(dist[i][j] for i in range(len(f1))) for j in range(len(f2)))
    return max(forward, backward)


@dataclass(frozen=True)
class MedianResult:
    tree: Phylogeny
    total: Fraction
    co_minima: tuple[Phylogeny, ...]


def median_exhaustive(profile, p, kind: Kind, cap: int | None = None) -> MedianResult:
    """Exhaustive median: argmin over all phylogenies of the profile distance.

    All co-minima are reported; the representative tree is the first in
    canonical Newick order.
    """
    profile = list(profile)
    if not profile:
        raise TreeError("empty profile")
    taxa = profile[0].taxa
    p = Fraction(p)
    best: Fraction | None = None
    winners: list[Phylogeny] = []
    for cand in enumerate_phylogenies(taxa.n, kind, taxa=taxa, cap=cap):
        total = sum((classify(cand, member).to_distance_pair().evaluate(p)
                     for member in profile), Fraction(0))
        if best is None or total < best:
            best = total
            winners = [cand]
        elif total == best:
            winners.append(cand)
    winners.sort(key=write_newick)
    return MedianResult(winners[0], best, tuple(winners))


def profile_distance_brute(tree: Phylogeny, profile, p) -> Fraction:
    p = Fraction(p)
    return sum((classify(tree, member).to_distance_pair().evaluate(p)
                for member in profile), Fraction(0))
