"""Per-node exploration via the coin dropping game, with query accounting.

A query for node v grows an explored set S_v over super-iterations.  Each
super-iteration recomputes the S_v-induced layering, places x coins on v,
and runs synchronous forwarding rounds: a node holding at least as many
coins as its forwarding-set size splits them equally among the set (an
exact rational split) and keeps nothing; smaller holdings are parked.
Coins that land outside S_v never move again, and every node outside S_v
holding coins at the end of the super-iteration joins S_v.

Coin amounts are exact rationals.  Internally they are integers over one
shared denominator (rescaled by the lcm of the active split sizes), which
keeps the arithmetic exact while avoiding per-operation normalization.
The iteration loop stops early only at provable no-op points: no node can
forward, the state repeats (period one or two), at which moment nothing
observable can change any more.

Query accounting follows a memoized probe model: reading the i-th
adjacency entry of a node is charged once, ever.  Knowing the explored
subgraph charges, for each member, the adjacency prefix up to its last
member neighbor; picking outside forwarding targets charges the prefix
scanned while collecting them.  Degrees are charged once per member.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction

from .partition import INF, PartialBetaPartition


@dataclass
class QueryLedger:
    """Monotone counters for one query."""

    adjacency_probes: int = 0
    degree_probes: int = 0
    explored_edges: int = 0
    max_joined_per_super: int = 0
    super_iterations: int = 0


@dataclass
class LcaOutput:
    proof: PartialBetaPartition
    layer_of_root: object  # int or INF
    ledger: QueryLedger


def layer_threshold(x, beta):
    """Largest t with (beta+1)**t <= x, computed in exact integer arithmetic."""
    t = 0
    p = beta + 1
    while p <= x:
        t += 1
        p *= beta + 1
    return t


class CoinGameState:
    """Mutable per-query state; confined to a single query, never shared."""

    __slots__ = (
        "graph",
        "root",
        "x",
        "beta",
        "explored",
        "coins",
        "super_iteration",
        "sigma",
        "fsets",
        "ledger",
        "_internal_adj",
        "_probed",
    )

    def __init__(self, g, root, x, beta):
        if x < 1:
            raise ValueError("x must be >= 1")
        if beta < 1:
            raise ValueError("beta must be >= 1")
        self.graph = g
        self.root = root
        self.x = x
        self.beta = beta
        self.explored = set()
        self.coins = {}
        self.super_iteration = 0
        self.sigma = None
        self.fsets = {}
        self.ledger = QueryLedger()
        self._internal_adj = {}
        self._probed = {}
        self._join(root)

    # -- probe accounting ---------------------------------------------------

    def _charge_prefix(self, u, length):
        prev = self._probed.get(u, 0)
        if length > prev:
            self._probed[u] = length
            self.ledger.adjacency_probes += length - prev

    def _join(self, w):
        g = self.graph
        self.explored.add(w)
        self.ledger.degree_probes += 1
        adj = g.adjacency[w]
        internal = []
        last_idx = -1
        members = self.explored
        for idx, nb in enumerate(adj):
            if nb in members and nb != w:
                internal.append(nb)
                last_idx = idx
        if last_idx >= 0:
            self._charge_prefix(w, last_idx + 1)
        self._internal_adj[w] = internal
        for nb in internal:
            self._internal_adj[nb].append(w)
            pos = bisect_left(g.adjacency[nb], w)
            self._charge_prefix(nb, pos + 1)
        self.ledger.explored_edges += len(internal)

    # -- step 1: induced layering and forwarding sets ------------------------

    def _sigma_local(self):
        g = self.graph
        beta = self.beta
        members = self.explored
        internal_adj = self._internal_adj
        degrees = g.degrees
        inf_count = {u: degrees[u] for u in members}
        finite = {}
        frontier = sorted(u for u in members if inf_count[u] <= beta)
        layer = 0
        while frontier:
            for v in frontier:
                finite[v] = layer
            nxt = []
            for v in frontier:
                for u in internal_adj[v]:
                    if u not in finite:
                        c = inf_count[u] - 1
                        inf_count[u] = c
                        if c == beta:
                            nxt.append(u)
            nxt.sort()
            frontier = nxt
            layer += 1
        return finite

    def _forward_list(self, u, finite):
        """Targets ranked: outside (all at infinity) by id, then explored
        infinity nodes by id, then finite layers descending with id ties."""
        g = self.graph
        deg = g.degrees[u]
        k = min(deg, self.beta + 1)
        if k == 0:
            return ()
        members = self.explored
        adj = g.adjacency[u]
        outside = []
        scanned = 0
        for idx, w in enumerate(adj):
            scanned = idx + 1
            if w not in members:
                outside.append(w)
                if len(outside) == k:
                    break
        self._charge_prefix(u, scanned)
        if len(outside) >= k:
            return tuple(outside)
        rest = []
        for w in self._internal_adj[u]:
            lw = finite.get(w)
            if lw is None:
                rest.append((0, w))
            else:
                rest.append((1, -lw, w))
        rest.sort()
        picked = outside + [t[-1] for t in rest[: k - len(outside)]]
        return tuple(picked)

    def refresh_rules(self):
        finite = self._sigma_local()
        self.sigma = PartialBetaPartition(beta=self.beta, n=self.graph.n, finite=finite)
        self.fsets = {u: self._forward_list(u, finite) for u in sorted(self.explored)}


def run_super_iteration(g, st, x, beta, trace=None):
    """One super-iteration: refresh rules, drop x coins on the root, run the
    synchronous forwarding rounds, and absorb every outside coin holder.

    ``trace``, if given, is a list collecting per-round Fraction totals of
    (circulating, parked outside) coins, used by conservation tests.
    """
    if st.graph is not g or st.x != x or st.beta != beta:
        raise ValueError("state was built for different game parameters")
    st.refresh_rules()
    members = st.explored
    fsets = st.fsets
    flen = {u: len(fsets[u]) for u in members}

    n = g.n
    cap = n if n <= 10_000 else min(n, 2 * x * x * (beta + 2))

    inside = {st.root: x}  # integer amounts over the shared denominator
    scale = 1
    outside = {}
    prev1 = prev2 = None
    rounds_run = 0
    while rounds_run < cap:
        senders = [
            u
            for u, amt in inside.items()
            if flen[u] > 0 and amt >= flen[u] * scale
        ]
        if not senders:
            break
        rounds_run += 1
        mul = math.lcm(*(flen[u] for u in senders))
        if mul > 1:
            scale *= mul
            inside = {v: a * mul for v, a in inside.items()}
        sender_set = set(senders)
        nxt = {v: a for v, a in inside.items() if v not in sender_set}
        for u in senders:
            share = inside[u] // flen[u]
            for w in fsets[u]:
                if w in members:
                    nxt[w] = nxt.get(w, 0) + share
                else:
                    outside[w] = outside.get(w, 0) + Fraction(share, scale)
        # normalize the shared denominator so cyclic states stay small
        gcd = math.gcd(scale, *nxt.values()) if nxt else scale
        if gcd > 1:
            scale //= gcd
            nxt = {v: a // gcd for v, a in nxt.items()}
        if trace is not None:
            circ = sum((Fraction(a, scale) for a in nxt.values()), Fraction(0))
            park = sum(outside.values(), Fraction(0))
            trace.append((circ, park))
        snap = (scale, tuple(sorted(nxt.items())))
        if snap == prev1 or snap == prev2:
            inside = nxt
            break
        prev2 = prev1
        prev1 = snap
        inside = nxt

    joined = sorted(outside)
    for w in joined:
        st._join(w)
    st.coins = {}
    st.super_iteration += 1
    st.ledger.super_iterations += 1
    if len(joined) > st.ledger.max_joined_per_super:
        st.ledger.max_joined_per_super = len(joined)
    return st


def lca_query(g, v, x, beta):
    """Run the full game for ``v`` and emit its proof partition.

    Up to x**2 super-iterations, stopping early once a super-iteration adds
    nothing (the game state is then a fixpoint).  The proof keeps exactly
    the explored nodes whose layer is at most ``layer_threshold(x, beta)``;
    everything else is reported at infinity.  If v's witness set has at most
    x**2 nodes and its global layer is within the threshold, the reported
    layer equals the global layer.
    """
    if x < 2:
        raise ValueError("x must be >= 2")
    st = CoinGameState(g, v, x, beta)
    for _ in range(x * x):
        before = len(st.explored)
        run_super_iteration(g, st, x, beta)
        if len(st.explored) == before:
            break
    # the proof reads the induced layering of the final explored set; the
    # forwarding sets are not needed again, so no fresh scan is charged
    finite = st._sigma_local()
    t = layer_threshold(x, beta)
    proof_finite = {u: l for u, l in finite.items() if l <= t}
    proof = PartialBetaPartition(beta=beta, n=g.n, finite=proof_finite)
    return LcaOutput(
        proof=proof,
        layer_of_root=proof_finite.get(v, INF),
        ledger=st.ledger,
    )


def lca_sweep(g, x, beta):
    """Independent queries for every node; a pure function of (g, x, beta)."""
    return {v: lca_query(g, v, x, beta) for v in range(g.n)}
