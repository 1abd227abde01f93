"""Immutable simple graphs, bounded-arboricity generators, and exact oracles.

Node ids are dense integers ``0..n-1`` and every adjacency list is sorted
ascending, so "the i-th neighbor of v" is well defined and deterministic.
The forest-union generator doubles as a constructive arboricity certificate:
a graph built from ``alpha`` edge-disjoint forests has arboricity at most
``alpha``.  For tiny graphs the Nash-Williams density maximum is computed
exhaustively and serves as the ground truth in tests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass


class GraphFormatError(ValueError):
    """Raised for malformed edge-list or certificate text."""


class Graph:
    """Simple undirected graph with sorted adjacency lists.

    Immutable after construction; safe to share across threads.
    """

    __slots__ = ("n", "edges", "adjacency", "degrees")

    def __init__(self, n, edges):
        if n < 0:
            raise ValueError("node count must be non-negative")
        seen = set()
        canon = []
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            canon.append(key)
        canon.sort()
        adj = [[] for _ in range(n)]
        for u, v in canon:
            adj[u].append(v)
            adj[v].append(u)
        for lst in adj:
            lst.sort()
        self.n = n
        self.edges = tuple(canon)
        self.adjacency = tuple(tuple(lst) for lst in adj)
        self.degrees = tuple(len(lst) for lst in adj)

    @property
    def m(self):
        return len(self.edges)

    def neighbors(self, v):
        return self.adjacency[v]

    def degree(self, v):
        return self.degrees[v]

    def has_edge(self, u, v):
        a = self.adjacency[u]
        if len(self.adjacency[v]) < len(a):
            a, v = self.adjacency[v], u
        lo, hi = 0, len(a)
        while lo < hi:
            mid = (lo + hi) // 2
            if a[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(a) and a[lo] == v

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class ArboricityCertificate:
    """Witness that a graph is the union of ``value`` edge-disjoint forests."""

    forests: tuple  # tuple of frozensets of (u, v) pairs with u < v
    value: int


@dataclass(frozen=True)
class NodeMapping:
    """Bijection between old node ids and the dense ids of a subgraph."""

    old_to_new: dict
    new_to_old: tuple

    def to_new(self, old):
        return self.old_to_new[old]

    def to_old(self, new):
        return self.new_to_old[new]


def _prufer_tree_edges(n, rng):
    # Decode a uniformly random Prufer sequence into a labelled tree.
    if n <= 1:
        return []
    if n == 2:
        return [(0, 1)]
    seq = [rng.randrange(n) for _ in range(n - 2)]
    deg = [1] * n
    for v in seq:
        deg[v] += 1
    edges = []
    # ptr/leaf scan is the standard O(n) decode; node n-1 is never consumed
    # as a leaf, so the final edge always attaches to it.
    ptr = 0
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    for v in seq:
        edges.append((min(leaf, v), max(leaf, v)))
        deg[v] -= 1
        if deg[v] == 1 and v < ptr:
            leaf = v
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((min(leaf, n - 1), max(leaf, n - 1)))
    return edges


def generate_forest_union(n, alpha, seed):
    """Union of ``alpha`` uniformly random spanning trees on ``n`` nodes.

    Edges already present are dropped from later forests, so the returned
    certificate lists pairwise edge-disjoint forests whose union is exactly
    the edge set.  Deterministic for a fixed ``(n, alpha, seed)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if alpha < 1:
        raise ValueError("alpha must be >= 1")
    rng = random.Random(seed)
    present = set()
    forests = []
    for _ in range(alpha):
        tree = _prufer_tree_edges(n, rng)
        fresh = [e for e in tree if e not in present]
        present.update(fresh)
        forests.append(frozenset(fresh))
    g = Graph(n, sorted(present))
    cert = ArboricityCertificate(forests=tuple(forests), value=alpha)
    return g, cert


def validate_certificate(g, cert):
    """Check disjointness, acyclicity and coverage of a forest certificate."""
    union = set()
    for forest in cert.forests:
        if union & forest:
            return False
        union |= forest
        parent = list(range(g.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in forest:
            ru, rv = find(u), find(v)
            if ru == rv:
                return False  # cycle inside a forest
            parent[ru] = rv
    return union == set(g.edges)


def arboricity_exact_small(g):
    """Exact arboricity by exhaustive subset enumeration (n <= 16 only).

    Returns the maximum over all vertex subsets W with |W| >= 2 of
    ceil(|E(G[W])| / (|W| - 1)).  Edgeless graphs get 0 by convention since
    the density maximum needs at least one edge to be positive.
    """
    if g.n > 16:
        raise ValueError("exact arboricity oracle is limited to n <= 16")
    if g.m == 0:
        return 0
    adj_mask = [0] * g.n
    for u, v in g.edges:
        adj_mask[u] |= 1 << v
        adj_mask[v] |= 1 << u
    total = 1 << g.n
    # edge_count[W] built by peeling the lowest set bit of W.
    edge_count = [0] * total
    best = 0
    for w in range(1, total):
        low = w & (-w)
        v = low.bit_length() - 1
        rest = w ^ low
        cnt = edge_count[rest] + (adj_mask[v] & rest).bit_count()
        edge_count[w] = cnt
        k = w.bit_count()
        if k >= 2 and cnt:
            val = -(-cnt // (k - 1))
            if val > best:
                best = val
    return best


def degree_tail_count(g, beta):
    """Number of nodes with degree strictly greater than ``beta``."""
    if beta < 1:
        raise ValueError("beta must be >= 1")
    return sum(1 for d in g.degrees if d > beta)


def induced_subgraph(g, keep):
    """Subgraph induced by ``keep`` with a dense re-indexing.

    New ids follow ascending old-id order, which preserves the sortedness
    of adjacency lists.  Returns ``(subgraph, mapping)``.
    """
    kept = sorted(set(keep))
    for v in kept:
        if not (0 <= v < g.n):
            raise ValueError(f"node {v} not in graph")
    old_to_new = {old: new for new, old in enumerate(kept)}
    keep_set = old_to_new.keys()
    edges = [
        (old_to_new[u], old_to_new[v])
        for u, v in g.edges
        if u in keep_set and v in keep_set
    ]
    sub = Graph(len(kept), edges)
    return sub, NodeMapping(old_to_new=old_to_new, new_to_old=tuple(kept))


# -- text formats ------------------------------------------------------------
#
# Edge list: first line "n m", then m lines "u v" with 0 <= u < v < n.
# Certificate sidecar: "alpha <value>", then per forest a header
# "forest <index> <edge count>" followed by its edges, one per line.


def write_edge_list(g, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")


def read_edge_list(path):
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise GraphFormatError("empty edge-list file")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphFormatError("first line must be 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphFormatError("non-integer header") from exc
    if len(lines) - 1 != m:
        raise GraphFormatError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphFormatError(f"bad edge line: {ln!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphFormatError(f"non-integer edge line: {ln!r}") from exc
        if not (0 <= u < v < n):
            raise GraphFormatError(f"edge line {ln!r} violates 0 <= u < v < n")
        edges.append((u, v))
    try:
        return Graph(n, edges)
    except ValueError as exc:
        raise GraphFormatError(str(exc)) from exc


def write_certificate(cert, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"alpha {cert.value}\n")
        for idx, forest in enumerate(cert.forests):
            fh.write(f"forest {idx} {len(forest)}\n")
            for u, v in sorted(forest):
                fh.write(f"{u} {v}\n")


def read_certificate(path):
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("alpha "):
        raise GraphFormatError("certificate must start with 'alpha <value>'")
    value = int(lines[0].split()[1])
    forests = []
    i = 1
    while i < len(lines):
        parts = lines[i].split()
        if parts[0] != "forest" or len(parts) != 3:
            raise GraphFormatError(f"bad forest header: {lines[i]!r}")
        count = int(parts[2])
        edges = set()
        for j in range(i + 1, i + 1 + count):
            u, v = (int(x) for x in lines[j].split())
            edges.add((u, v))
        forests.append(frozenset(edges))
        i += 1 + count
    if len(forests) != value:
        raise GraphFormatError("forest count does not match alpha")
    return ArboricityCertificate(forests=tuple(forests), value=value)
