"""Rooted and unrooted multifurcating phylogenies over a fixed taxon set.

A `Phylogeny` is an immutable leaf-labeled tree stored as an integer node
arena (parent / children arrays).  Rooted trees have a semantic root; for
unrooted trees the same arrays hold an arbitrary orientation from a
distinguished "handle" node, which carries no meaning beyond giving the
traversal code a place to start.

The module also provides the elementary editing operations used by the
consensus and Hausdorff machinery (`pull_out`, `pull_2_out`, `contract`),
restriction to a taxon subset, induced triplet/quartet topologies, the
refinement partial order, and canonical forms for isomorphism checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence


class TreeError(ValueError):
    """Invalid tree structure or an operation applied out of its domain."""


class Kind(Enum):
    ROOTED = "rooted"
    UNROOTED = "unrooted"


@dataclass(frozen=True)
class TaxonSet:
    """Ordered set of unique taxon labels; index i <-> labels[i]."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) == 0:
            raise TreeError("taxon set must be non-empty")
        if len(set(self.labels)) != len(self.labels):
            raise TreeError("duplicate taxon labels")
        if any(not lab for lab in self.labels):
            raise TreeError("empty taxon label")
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, taxon) -> int:
        """Map a label (or an already-resolved integer index) to its index."""
        if isinstance(taxon, str):
            try:
                return self._index[taxon]
            except KeyError:
                raise TreeError(f"unknown taxon {taxon!r}") from None
        i = int(taxon)
        if not 0 <= i < self.n:
            raise TreeError(f"taxon index {i} out of range")
        return i

    def label(self, i: int) -> str:
        return self.labels[i]

    @classmethod
    def of(cls, labels: Iterable[str], sort: bool = False) -> "TaxonSet":
        labs = sorted(labels) if sort else list(labels)
        return cls(tuple(labs))


class TripletTopology(Enum):
    """Topology of a rooted tree restricted to a sorted triplet a < b < c.

    A_BC means a is apart (a|bc), and so on; FAN is the unresolved star.
    """

    A_BC = "a|bc"
    B_AC = "b|ac"
    C_AB = "c|ab"
    FAN = "fan"


class QuartetTopology(Enum):
    """Topology of an unrooted tree restricted to a sorted quartet a < b < c < d."""

    AB_CD = "ab|cd"
    AC_BD = "ac|bd"
    AD_BC = "ad|bc"
    STAR = "star"


class Phylogeny:
    """Immutable phylogeny over a TaxonSet.

    Nodes are integers 0..m-1.  `children[v]` lists v's children in the
    stored orientation, `parent[v]` is -1 for the root/handle.  Leaves are
    in bijection with taxa via `leaf_taxon[v]`.
    """

    __slots__ = ("kind", "taxa", "children", "parent", "root", "leaf_taxon", "_cache")

    def __init__(self, kind: Kind, taxa: TaxonSet, children: Sequence[Sequence[int]],
                 root: int, leaf_taxon: Sequence[int | None]):
        m = len(children)
        if not (len(leaf_taxon) == m and 0 <= root < m):
            raise TreeError("inconsistent node arrays")
        parent = [-1] * m
        seen = 1
        for v in range(m):
            for c in children[v]:
                if parent[c] != -1 or c == root:
                    raise TreeError("node has two parents or root has a parent")
                parent[c] = v
                seen += 1
        if seen != m:
            raise TreeError("tree is not connected")
        self.kind = kind
        self.taxa = taxa
        self.children = tuple(tuple(cs) for cs in children)
        self.parent = tuple(parent)
        self.root = root
        self.leaf_taxon = tuple(leaf_taxon)
        self._cache: dict = {}

    # -- basic accessors -------------------------------------------------

    @property
    def n(self) -> int:
        return self.taxa.n

    @property
    def num_nodes(self) -> int:
        return len(self.children)

    def is_rooted(self) -> bool:
        return self.kind is Kind.ROOTED

    def is_leaf(self, v: int) -> bool:
        return self.leaf_taxon[v] is not None

    def neighbors(self, v: int) -> tuple[int, ...]:
        if self.parent[v] >= 0:
            return self.children[v] + (self.parent[v],)
        return self.children[v]

    def degree(self, v: int) -> int:
        return len(self.children[v]) + (1 if self.parent[v] >= 0 else 0)

    def internal_nodes(self) -> list[int]:
        return [v for v in range(self.num_nodes) if not self.is_leaf(v)]

    def leaves(self) -> list[int]:
        return [v for v in range(self.num_nodes) if self.is_leaf(v)]

    def leaf_of_taxon(self, taxon) -> int:
        t = self.taxa.index(taxon)
        table = self._cache.get("leaf_of_taxon")
        if table is None:
            table = [-1] * self.n
            for v, tx in enumerate(self.leaf_taxon):
                if tx is not None:
                    table[tx] = v
            self._cache["leaf_of_taxon"] = table
        return table[t]

    def is_unresolved(self, v: int) -> bool:
        """Polytomy test: >2 children (rooted) or degree >3 (unrooted)."""
        if self.is_leaf(v):
            return False
        if self.kind is Kind.ROOTED:
            return len(self.children[v]) > 2
        return self.degree(v) > 3

    def unresolved_nodes(self) -> list[int]:
        return [v for v in self.internal_nodes() if self.is_unresolved(v)]

    def is_fully_resolved(self) -> bool:
        return not self.unresolved_nodes()

    # -- traversals and per-node tables ---------------------------------

    def postorder(self) -> list[int]:
        order = self._cache.get("postorder")
        if order is None:
            order, stack = [], [(self.root, False)]
            while stack:
                v, done = stack.pop()
                if done:
                    order.append(v)
                else:
                    stack.append((v, True))
                    for c in self.children[v]:
                        stack.append((c, False))
            self._cache["postorder"] = order
        return order

    def subtree_sizes(self) -> list[int]:
        """alpha[v] = number of leaves in the oriented subtree at v."""
        alpha = self._cache.get("alpha")
        if alpha is None:
            alpha = [0] * self.num_nodes
            for v in self.postorder():
                alpha[v] = 1 if self.is_leaf(v) else sum(alpha[c] for c in self.children[v])
            self._cache["alpha"] = alpha
        return alpha

    def depths(self) -> list[int]:
        depth = self._cache.get("depth")
        if depth is None:
            depth = [0] * self.num_nodes
            for v in reversed(self.postorder()):
                if v != self.root:
                    depth[v] = depth[self.parent[v]] + 1
            self._cache["depth"] = depth
        return depth

    def subtree_taxa(self, v: int) -> frozenset[int]:
        sets = self._cache.get("subtree_taxa")
        if sets is None:
            sets = [None] * self.num_nodes
            for u in self.postorder():
                if self.is_leaf(u):
                    sets[u] = frozenset((self.leaf_taxon[u],))
                else:
                    sets[u] = frozenset().union(*(sets[c] for c in self.children[u]))
            self._cache["subtree_taxa"] = sets
        return sets[v]

    def leaf_lca_tables(self) -> tuple[list[list[int]], list[list[int]]]:
        """(lca_node, lca_depth) for every ordered pair of taxon indices.

        Computed once per tree in the stored orientation; O(n^2 * depth).
        """
        cached = self._cache.get("leaf_lca")
        if cached is not None:
            return cached
        n = self.n
        depth = self.depths()
        leaf = [self.leaf_of_taxon(i) for i in range(n)]
        anc_pos = []  # taxon -> {ancestor node: position from leaf}
        for i in range(n):
            path = {}
            v = leaf[i]
            while v != -1:
                path[v] = len(path)
                v = self.parent[v]
            anc_pos.append(path)
        lca_node = [[0] * n for _ in range(n)]
        lca_depth = [[0] * n for _ in range(n)]
        for i in range(n):
            pi = anc_pos[i]
            for j in range(n):
                v = leaf[j]
                while v not in pi:
                    v = self.parent[v]
                lca_node[i][j] = v
                lca_depth[i][j] = depth[v]
        self._cache["leaf_lca"] = (lca_node, lca_depth)
        return lca_node, lca_depth

    # -- validation ------------------------------------------------------

    def validate(self) -> list[str]:
        """Return all invariant violations (empty list when valid)."""
        problems = []
        seen_taxa = {}
        for v in range(self.num_nodes):
            t = self.leaf_taxon[v]
            if t is not None:
                if self.children[v]:
                    problems.append(f"node {v}: leaf with children")
                if t in seen_taxa:
                    problems.append(f"node {v}: duplicate taxon {self.taxa.label(t)!r}")
                seen_taxa[t] = v
            else:
                if self.kind is Kind.ROOTED:
                    if len(self.children[v]) < 2:
                        problems.append(f"node {v}: internal node with <2 children")
                else:
                    # n <= 2 forces a degree-2 handle; nothing better exists.
                    if self.degree(v) < 3 and self.n > 2:
                        problems.append(f"node {v}: internal node with degree <3")
        missing = set(range(self.n)) - set(seen_taxa)
        if missing:
            labs = sorted(self.taxa.label(t) for t in missing)
            problems.append(f"taxa without leaves: {labs}")
        return problems

    # -- construction helpers -------------------------------------------

    @classmethod
    def rooted(cls, taxa: TaxonSet | Iterable[str], nested) -> "Phylogeny":
        """Build a rooted tree from a nested structure of taxon labels/indices.

        Example: Phylogeny.rooted(["a","b","c","d"], ((("a","b"),"c"),"d")).
        """
        if not isinstance(taxa, TaxonSet):
            taxa = TaxonSet.of(taxa)
        children: list[list[int]] = []
        leaf_taxon: list[int | None] = []

        def build(node) -> int:
            vid = len(children)
            children.append([])
            leaf_taxon.append(None)
            if isinstance(node, (tuple, list)):
                children[vid] = [build(c) for c in node]
            else:
                leaf_taxon[vid] = taxa.index(node)
            return vid

        root = build(nested)
        return cls(Kind.ROOTED, taxa, children, root, leaf_taxon)

    @classmethod
    def unrooted(cls, taxa: TaxonSet | Iterable[str], nested) -> "Phylogeny":
        """Build an unrooted tree; the top-level tuple is the handle node."""
        if not isinstance(taxa, TaxonSet):
            taxa = TaxonSet.of(taxa)
        t = cls.rooted(taxa, nested)
        return cls(Kind.UNROOTED, taxa, t.children, t.root, t.leaf_taxon)

    @classmethod
    def from_adjacency(cls, kind: Kind, taxa: TaxonSet, adj: Sequence[Iterable[int]],
                       leaf_taxon: Sequence[int | None], root: int) -> "Phylogeny":
        """Orient an adjacency-list tree from `root` (BFS order preserved)."""
        m = len(adj)
        children: list[list[int]] = [[] for _ in range(m)]
        parent = [-2] * m
        parent[root] = -1
        queue = [root]
        while queue:
            v = queue.pop(0)
            for w in adj[v]:
                if parent[w] == -2:
                    parent[w] = v
                    children[v].append(w)
                    queue.append(w)
        return cls(kind, taxa, children, root, leaf_taxon)

    def _adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.num_nodes)]
        for v in range(self.num_nodes):
            if self.parent[v] >= 0:
                adj[v].append(self.parent[v])
                adj[self.parent[v]].append(v)
        return adj

    # -- canonical form / isomorphism -----------------------------------

    def canonical_key(self) -> str:
        """Canonical string; equal keys <=> isomorphic leaf-labeled trees."""
        key = self._cache.get("canonical")
        if key is not None:
            return key

        def enc(v: int, banned: int) -> str:
            t = self.leaf_taxon[v]
            if t is not None:
                return f"L{self.taxa.label(t)!r}"
            parts = sorted(enc(c, v) for c in self.neighbors(v) if c != banned) \
                if self.kind is Kind.UNROOTED else sorted(enc(c, v) for c in self.children[v])
            return "(" + ",".join(parts) + ")"

        if self.kind is Kind.ROOTED:
            key = "R" + enc(self.root, -1)
        else:
            if self.n <= 2:
                key = "U(" + ",".join(sorted(
                    f"L{self.taxa.label(t)!r}" for t in self.leaf_taxon if t is not None)) + ")"
            else:
                first = min(range(self.n), key=self.taxa.label)
                leaf0 = self.leaf_of_taxon(first)
                anchor = self.neighbors(leaf0)[0]
                key = f"U(L{self.taxa.label(first)!r}|" + enc(anchor, leaf0) + ")"
        self._cache["canonical"] = key
        return key

    def isomorphic(self, other: "Phylogeny") -> bool:
        return (self.kind is other.kind
                and sorted(self.taxa.labels) == sorted(other.taxa.labels)
                and self.canonical_key() == other.canonical_key())

    # -- clusters and splits --------------------------------------------

    def clusters(self) -> frozenset[frozenset[int]]:
        """Taxon sets below each internal non-root node (rooted trees)."""
        if self.kind is not Kind.ROOTED:
            raise TreeError("clusters are defined for rooted trees")
        return frozenset(self.subtree_taxa(v) for v in self.internal_nodes() if v != self.root)

    def splits(self) -> frozenset[frozenset[int]]:
        """Internal-edge bipartitions, each keyed by the side containing taxon 0."""
        if self.kind is not Kind.UNROOTED:
            raise TreeError("splits are defined for unrooted trees")
        everything = frozenset(range(self.n))
        out = set()
        for v in self.internal_nodes():
            p = self.parent[v]
            if p >= 0 and not self.is_leaf(p):
                side = self.subtree_taxa(v)
                out.add(side if 0 in side else everything - side)
        return frozenset(out)


# ---------------------------------------------------------------------------
# Restriction and induced topologies
# ---------------------------------------------------------------------------

def restrict(tree: Phylogeny, subset) -> Phylogeny:
    """Restriction of `tree` to a taxon subset (degree-2 nodes suppressed)."""
    idx = sorted({tree.taxa.index(x) for x in subset})
    if not idx:
        raise TreeError("restriction to an empty taxon set")
    keep = set(idx)
    sub_taxa = TaxonSet(tuple(tree.taxa.label(i) for i in idx))
    remap = {old: new for new, old in enumerate(idx)}

    children: list[list[int]] = []
    leaf_taxon: list[int | None] = []

    def build(v: int):
        t = tree.leaf_taxon[v]
        if t is not None:
            if t not in keep:
                return None
            children.append([])
            leaf_taxon.append(remap[t])
            return len(children) - 1
        kept = [c for c in (build(c) for c in tree.children[v]) if c is not None]
        if not kept:
            return None
        if len(kept) == 1:
            return kept[0]
        children.append(kept)
        leaf_taxon.append(None)
        return len(children) - 1

    root = build(tree.root)
    if tree.kind is Kind.ROOTED or len(idx) <= 2:
        return Phylogeny(tree.kind, sub_taxa, children, root, leaf_taxon)
    # Unrooted: a handle of degree 2 is not a real node; splice it out.
    if len(children[root]) == 2 and leaf_taxon[root] is None:
        a, b = children[root]
        keep = a if leaf_taxon[a] is None else b
        other = b if keep == a else a
        children[keep] = list(children[keep]) + [other]
        children[root] = []
        return _compact(Kind.UNROOTED, sub_taxa, children, keep, leaf_taxon)
    return Phylogeny(Kind.UNROOTED, sub_taxa, children, root, leaf_taxon)


def _compact(kind: Kind, taxa: TaxonSet, children, root, leaf_taxon) -> Phylogeny:
    """Rebuild node arrays keeping only nodes reachable from root."""
    order = []
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(children[v])
    remap = {old: new for new, old in enumerate(order)}
    new_children = [[remap[c] for c in children[v]] for v in order]
    new_leaf = [leaf_taxon[v] for v in order]
    return Phylogeny(kind, taxa, new_children, remap[root], new_leaf)


def triplet_topology(tree: Phylogeny, triplet) -> TripletTopology:
    """Induced topology of a rooted tree on three taxa (LCA-depth method)."""
    if tree.kind is not Kind.ROOTED:
        raise TreeError("triplet topologies are defined for rooted trees")
    a, b, c = sorted(tree.taxa.index(x) for x in triplet)
    if len({a, b, c}) != 3:
        raise TreeError("triplet must contain three distinct taxa")
    _, d = tree.leaf_lca_tables()
    dab, dac, dbc = d[a][b], d[a][c], d[b][c]
    top = max(dab, dac, dbc)
    if dab == dac == dbc:
        return TripletTopology.FAN
    if dbc == top:
        return TripletTopology.A_BC
    if dac == top:
        return TripletTopology.B_AC
    return TripletTopology.C_AB


def quartet_topology(tree: Phylogeny, quartet) -> QuartetTopology:
    """Induced topology of an unrooted tree on four taxa.

    Uses path-median nodes: for quartet {a,b,c,d}, med(a,b,c) == med(a,b,d)
    exactly when the topology is ab|cd; all medians coincide for a star.
    """
    if tree.kind is not Kind.UNROOTED:
        raise TreeError("quartet topologies are defined for unrooted trees")
    a, b, c, d = sorted(tree.taxa.index(x) for x in quartet)
    if len({a, b, c, d}) != 4:
        raise TreeError("quartet must contain four distinct taxa")
    node, dep = tree.leaf_lca_tables()

    def median(x, y, z):
        best = node[x][y]
        bd = dep[x][y]
        for u, v in ((x, z), (y, z)):
            if dep[u][v] > bd:
                bd = dep[u][v]
                best = node[u][v]
        return best

    m1 = median(a, b, c)
    m2 = median(a, b, d)
    m3 = median(a, c, d)
    if m1 == m2:
        if m1 == m3:
            return QuartetTopology.STAR
        return QuartetTopology.AB_CD
    if m1 == m3:
        return QuartetTopology.AC_BD
    return QuartetTopology.AD_BC


def topology_by_restriction(tree: Phylogeny, subset):
    """Second, independent route: restrict explicitly and read the shape."""
    sub = restrict(tree, subset)
    if tree.kind is Kind.ROOTED:
        if len(sub.children[sub.root]) == 3:
            return TripletTopology.FAN
        apart = next(sub.leaf_taxon[ch] for ch in sub.children[sub.root]
                     if sub.leaf_taxon[ch] is not None)
        return {0: TripletTopology.A_BC, 1: TripletTopology.B_AC,
                2: TripletTopology.C_AB}[apart]
    # unrooted quartet
    if sub.num_nodes == 5:
        return QuartetTopology.STAR
    # two internal nodes; find the cherry at the non-handle internal node
    inner = next(v for v in sub.internal_nodes() if v != sub.root)
    pair = sorted(sub.subtree_taxa(inner))
    return {(0, 1): QuartetTopology.AB_CD, (2, 3): QuartetTopology.AB_CD,
            (0, 2): QuartetTopology.AC_BD, (1, 3): QuartetTopology.AC_BD,
            (0, 3): QuartetTopology.AD_BC, (1, 2): QuartetTopology.AD_BC}[tuple(pair)]


# ---------------------------------------------------------------------------
# Refinement order and elementary edits
# ---------------------------------------------------------------------------

def is_refinement(coarse: Phylogeny, fine: Phylogeny) -> bool:
    """True iff `coarse` can be obtained from `fine` by edge contractions."""
    if coarse.kind is not fine.kind:
        raise TreeError("refinement compares trees of the same kind")
    if coarse.taxa.labels != fine.taxa.labels:
        raise TreeError("refinement compares trees over the same taxa")
    if coarse.kind is Kind.ROOTED:
        return coarse.clusters() <= fine.clusters()
    return coarse.splits() <= fine.splits()


def pull_out(tree: Phylogeny, u: int) -> Phylogeny:
    """Split u's parent v into v'(children u, v'') and v''(other children)."""
    if tree.kind is not Kind.ROOTED:
        raise TreeError("pull_out applies to rooted trees")
    v = tree.parent[u]
    if v < 0:
        raise TreeError("pull_out needs a non-root node")
    if len(tree.children[v]) < 3:
        raise TreeError("pull_out needs a parent with at least 3 children")
    m = tree.num_nodes
    children = [list(cs) for cs in tree.children]
    rest = [c for c in children[v] if c != u]
    children[v] = [u, m]
    children.append(rest)
    leaf_taxon = list(tree.leaf_taxon) + [None]
    return Phylogeny(Kind.ROOTED, tree.taxa, children, tree.root, leaf_taxon)


def pull_2_out(tree: Phylogeny, u1: int, u2: int) -> Phylogeny:
    """Split the shared neighbor v into v'(u1, u2, v'') and v''(the rest)."""
    if tree.kind is not Kind.UNROOTED:
        raise TreeError("pull_2_out applies to unrooted trees")
    if u1 == u2:
        raise TreeError("pull_2_out needs two distinct nodes")
    shared = set(tree.neighbors(u1)) & set(tree.neighbors(u2))
    if not shared:
        raise TreeError("nodes do not share a neighbor")
    v = shared.pop()
    if tree.degree(v) < 4:
        raise TreeError("pull_2_out needs the shared neighbor to have degree >= 4")
    m = tree.num_nodes
    adj = tree._adjacency()
    rest = [w for w in adj[v] if w not in (u1, u2)]
    adj[v] = [u1, u2, m]
    adj.append(rest + [v])
    for w in rest:
        adj[w] = [m if x == v else x for x in adj[w]]
    leaf_taxon = list(tree.leaf_taxon) + [None]
    return Phylogeny.from_adjacency(Kind.UNROOTED, tree.taxa, adj, leaf_taxon, tree.root)


def contract(tree: Phylogeny, u: int) -> Phylogeny:
    """Contract the oriented edge {u, parent(u)} by merging u into its parent."""
    v = tree.parent[u]
    if v < 0 or tree.is_leaf(u):
        raise TreeError("contract needs an internal, non-root node")
    children = [list(cs) for cs in tree.children]
    merged = []
    for c in children[v]:
        if c == u:
            merged.extend(children[u])
        else:
            merged.append(c)
    children[v] = merged
    children[u] = []
    # u is now orphaned; compact the arrays
    adjusted = [cs for cs in children]
    return _compact(tree.kind, tree.taxa,
                    [cs if i != u else [] for i, cs in enumerate(adjusted)],
                    tree.root, list(tree.leaf_taxon))
