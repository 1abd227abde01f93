"""Layered peeling partitions and their combinatorial machinery.

A partial beta-partition assigns each node a layer in N union {infinity}
such that every finite-layer node has at most ``beta`` neighbors in the same
or a higher layer.  Nodes in the infinity layer are unconstrained.  The
partition induced by peeling a node subset S (full-graph degrees, layers
assigned only inside S) is the guiding structure of the whole package:
restricted to a single node's explored set it steers the coin game, and
computed on the full vertex set it is the global ground truth that every
local output is checked against.

Layers are stored sparsely: only finite layers appear in the ``finite``
dict, everything else is infinity.  ``INF`` (``math.inf``) orders above
every finite layer, so plain comparisons and ``min`` do the right thing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

INF = math.inf


@dataclass(frozen=True)
class PartialBetaPartition:
    """Sparse node -> layer map; nodes absent from ``finite`` sit at infinity."""

    beta: int
    n: int
    finite: dict = field(default_factory=dict)

    def layer(self, v):
        return self.finite.get(v, INF)

    @property
    def infinity_count(self):
        return self.n - len(self.finite)

    @property
    def is_full(self):
        return len(self.finite) == self.n

    @property
    def size(self):
        """Number of distinct finite layers."""
        return len(set(self.finite.values()))

    def max_finite_layer(self):
        return max(self.finite.values()) if self.finite else None


@dataclass(frozen=True)
class DependencySet:
    """Nodes reachable from ``root`` along strictly layer-decreasing paths."""

    root: int
    members: frozenset


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple  # (node, count of same-or-higher-layer neighbors) pairs
    infinity_count: int
    size: int

    @property
    def valid(self):
        return not self.violations


def induced_partition(g, s, beta):
    """Peeling restricted to ``s``: repeatedly layer every still-unassigned
    node of ``s`` that has at most ``beta`` neighbors (in the full graph)
    currently at infinity.

    Iteration ``i`` assigns layer ``i``; the loop stops as soon as an
    iteration assigns nothing, at which point no later iteration could
    assign anything either.  Nodes outside ``s`` always stay at infinity.
    """
    if beta < 1:
        raise ValueError("beta must be >= 1")
    members = set(s)
    for v in members:
        if not (0 <= v < g.n):
            raise ValueError(f"node {v} not in graph")
    degrees = g.degrees
    adjacency = g.adjacency
    # inf_count[v] = neighbors currently at infinity; everyone starts there.
    inf_count = {v: degrees[v] for v in members}
    finite = {}
    frontier = [v for v in sorted(members) if inf_count[v] <= beta]
    layer = 0
    while frontier:
        for v in frontier:
            finite[v] = layer
        next_frontier = []
        for v in frontier:
            for u in adjacency[v]:
                if u in inf_count and u not in finite:
                    c = inf_count[u] - 1
                    inf_count[u] = c
                    if c == beta:
                        next_frontier.append(u)
        # the == beta crossing fires exactly once per node, so entries are
        # unique; sort only for a deterministic assignment record
        next_frontier.sort()
        frontier = next_frontier
        layer += 1
    return PartialBetaPartition(beta=beta, n=g.n, finite=finite)


def natural_partition(g, beta):
    """Peeling over the whole vertex set; the global layering oracle.

    If ``beta >= 2 * arboricity`` every node ends up with a finite layer,
    because each peeling round removes a constant fraction of what remains.
    """
    return induced_partition(g, range(g.n), beta)


def dependency_set(g, p, v):
    """Iterative expansion of the layer-witness set of ``v`` under ``p``.

    Empty when v sits at infinity; otherwise v plus, transitively, every
    neighbor with a strictly smaller layer.
    """
    lv = p.layer(v)
    if lv == INF:
        return DependencySet(root=v, members=frozenset())
    finite = p.finite
    members = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        lu = finite[u]
        if lu == 0:
            continue
        for w in g.adjacency[u]:
            lw = finite.get(w)
            if lw is not None and lw < lu and w not in members:
                members.add(w)
                stack.append(w)
    return DependencySet(root=v, members=frozenset(members))


def forwarding_set(g, s, sigma, u):
    """The min(deg(u), beta+1) neighbors of ``u`` ranked by sigma value.

    Infinity ranks above every finite layer.  Ties at infinity prefer
    neighbors outside ``s`` (steering exploration outward) and then lower
    ids; finite ties prefer lower ids.  The returned list is in rank order.
    """
    if u not in s:
        raise ValueError(f"node {u} is not in the explored set")
    k = min(g.degrees[u], sigma.beta + 1)
    if k == 0:
        return []
    finite = sigma.finite

    def key(w):
        lw = finite.get(w)
        if lw is None:
            return (0, 1 if w in s else 0, w)
        return (1, -lw, w)

    return sorted(g.adjacency[u], key=key)[:k]


def validate_partition(g, p):
    """Independent check of the layering contract.

    Every finite-layer node may have at most ``beta`` neighbors in the same
    or a higher layer (infinity counts as higher).  All-infinity assignments
    are vacuously valid.
    """
    finite = p.finite
    beta = p.beta
    over = {}
    for u, v in g.edges:
        lu = finite.get(u)
        lv = finite.get(v)
        if lu is not None and (lv is None or lv >= lu):
            over[u] = over.get(u, 0) + 1
        if lv is not None and (lu is None or lu >= lv):
            over[v] = over.get(v, 0) + 1
    violations = tuple(sorted((v, c) for v, c in over.items() if c > beta))
    return ValidationReport(
        violations=violations,
        infinity_count=p.infinity_count,
        size=p.size,
    )


def min_merge(parts):
    """Pointwise minimum of partial partitions (infinity is the top element).

    The minimum of valid partial beta-partitions is again valid, and a node
    is finite in the result exactly when it is finite in some input.
    """
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to merge")
    beta = parts[0].beta
    n = parts[0].n
    for p in parts[1:]:
        if p.beta != beta:
            raise ValueError(f"beta mismatch: {p.beta} != {beta}")
        if p.n != n:
            raise ValueError(f"universe mismatch: {p.n} != {n}")
    merged = {}
    for p in parts:
        for v, layer in p.finite.items():
            cur = merged.get(v)
            if cur is None or layer < cur:
                merged[v] = layer
    return PartialBetaPartition(beta=beta, n=n, finite=merged)


# -- text format ---------------------------------------------------------
#
# One line per node: "v layer", with the literal token "inf" for infinity.


def partition_to_text(p):
    lines = []
    for v in range(p.n):
        layer = p.finite.get(v)
        lines.append(f"{v} {'inf' if layer is None else layer}\n")
    return "".join(lines)


def partition_from_text(text, beta):
    finite = {}
    count = 0
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad partition line: {ln!r}")
        v = int(parts[0])
        count = max(count, v + 1)
        if parts[1] != "inf":
            finite[v] = int(parts[1])
    return PartialBetaPartition(beta=beta, n=count, finite=finite)
