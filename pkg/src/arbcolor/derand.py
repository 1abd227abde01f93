"""Exact derandomized trial coloring via the method of conditional expectations.

One trial assigns every still-uncolored node a palette slot through
``h(v) = ((a*v + b) mod p) mod K`` with seed ``(a, b)`` drawn from ``[p]^2``
and ``p`` the smallest prime above ``max(n, K^2)``; over a uniform seed any
two distinct nodes collide with probability at most ``(1/K)(1 + K/p)^2``.
The seed's ``2*ceil(log2 p)`` bits (high bits of ``a`` first, then ``b``)
are fixed in batches: each candidate batch value restricts the seed space
to an axis-aligned box, and the candidate minimizing the conditional
expectation of Y, the number of monochromatic edges touching an uncolored
node, is kept (ties to the numerically smallest value).

All expectations are exact rationals: integer collision counts over the
remaining seed box divided by its cardinality.  The counts come from two
cheap reductions instead of enumerating the box.  While b is completely
free, the number of b-collisions of an uncolored pair (u, v) at a given a
depends only on d = a*(v-u) mod p, so a single precomputed table C[d]
answers every such query; edges against an already-colored endpoint
contribute a constant per a.  Once a is pinned, collision indicators as a
function of b are materialized directly and prefix-summed.  Batches that
straddle the a/b boundary fall back to summing over the few remaining a
values.

Nodes with no incident monochromatic edge under the fixed seed keep their
hash color; the rest stay uncolored and the trial repeats on them.  Each
trial shrinks the uncolored set by more than the factor 1/x, so the loop
ends after about log_x n trials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

_DESK_SCALE_P = 20_000


class DerandFailure(RuntimeError):
    """The trial loop exceeded its hard iteration cap."""


def is_prime(k):
    if k < 2:
        return False
    if k % 2 == 0:
        return k == 2
    f = 3
    while f * f <= k:
        if k % f == 0:
            return False
        f += 2
    return True


def next_prime_above(k):
    cand = k + 1
    while not is_prime(cand):
        cand += 1
    return cand


@dataclass(frozen=True)
class TrialState:
    """Snapshot of one derandomized trial's parameters."""

    x: int
    palette: int
    prime: int
    seed_bits: int
    fixed_prefix: str
    batch_size: int
    uncolored: frozenset


@dataclass(frozen=True)
class TrialTrace:
    state: TrialState
    u_size: int
    expectation_initial: Fraction
    chain: tuple  # (bits_fixed, prefix_string, Fraction) after every batch
    seed: tuple  # (a, b)
    y_final: int
    blocked: int


class _SeedBoxCounter:
    """Exact monochromatic-edge counts over axis-aligned seed boxes."""

    def __init__(self, p, palette, pair_edges, fixed_edges):
        self.p = p
        self.palette = palette
        self.pair_edges = pair_edges  # (u, v) both uncolored
        self.fixed_edges = fixed_edges  # (u, color) against a colored endpoint
        self.T = (np.arange(p, dtype=np.int64) % palette).astype(np.int64)
        # C[d] = number of s with T[s] == T[(s+d) mod p]
        T = self.T
        C = np.empty(p, dtype=np.int64)
        for d in range(p):
            C[d] = int(np.count_nonzero(T == np.roll(T, -d)))
        self.C = C
        color_counts = np.bincount(self.T, minlength=palette).astype(np.int64)
        A = np.arange(p, dtype=np.int64)
        # F[a] = collisions summed over ALL b, as a function of a
        F = np.zeros(p, dtype=np.int64)
        for u, v in pair_edges:
            F += C[(A * ((v - u) % p)) % p]
        fixed_total = sum(int(color_counts[c]) for _, c in fixed_edges)
        F += fixed_total
        self._prefix_F = np.concatenate(([0], np.cumsum(F)))
        self._g_cache = {}

    def _g_prefix(self, a):
        """Prefix sums over b of the collision count at a fixed a."""
        cached = self._g_cache.get(a)
        if cached is not None:
            return cached
        p = self.p
        T = self.T
        B = np.arange(p, dtype=np.int64)
        G = np.zeros(p, dtype=np.int64)
        for u, v in self.pair_edges:
            G += (T[(a * u + B) % p] == T[(a * v + B) % p]).astype(np.int64)
        for u, c in self.fixed_edges:
            G += (T[(a * u + B) % p] == c).astype(np.int64)
        prefix = np.concatenate(([0], np.cumsum(G)))
        self._g_cache[a] = prefix
        return prefix

    def count(self, a_lo, a_hi, b_lo, b_hi):
        """Total monochromatic count over the box [a_lo,a_hi) x [b_lo,b_hi)."""
        if b_lo == 0 and b_hi == self.p:
            return int(self._prefix_F[a_hi] - self._prefix_F[a_lo])
        total = 0
        for a in range(a_lo, a_hi):
            pref = self._g_prefix(a)
            total += int(pref[b_hi] - pref[b_lo])
        return total

    def y_at(self, a, b):
        T = self.T
        p = self.p
        y = 0
        for u, v in self.pair_edges:
            if T[(a * u + b) % p] == T[(a * v + b) % p]:
                y += 1
        for u, c in self.fixed_edges:
            if T[(a * u + b) % p] == c:
                y += 1
        return y


def _seed_box(bits, nbits_half, p):
    """Box of seeds consistent with a bit prefix; None when it is empty.

    Bit 0 is the most significant bit of a; bits nbits_half.. are b's.
    """
    a_bits = bits[:nbits_half]
    b_bits = bits[nbits_half:]

    def half_interval(fixed):
        k = len(fixed)
        base = 0
        for bit in fixed:
            base = (base << 1) | bit
        lo = base << (nbits_half - k)
        hi = (base + 1) << (nbits_half - k)
        return lo, min(hi, p)

    a_lo, a_hi = half_interval(a_bits)
    b_lo, b_hi = half_interval(b_bits)
    if a_lo >= a_hi or b_lo >= b_hi:
        return None
    return a_lo, a_hi, b_lo, b_hi


def run_trial(scope, uncolored, colors, x, delta):
    """Fix one seed by batched conditional expectations; returns the trace
    plus the per-node hash colors of the uncolored set."""
    n = scope.n
    dmax = max(scope.degrees)
    palette = 2 * x * dmax
    p = next_prime_above(max(n, palette * palette))
    if p > _DESK_SCALE_P:
        raise ValueError(
            f"prime modulus {p} exceeds the desk-scale limit {_DESK_SCALE_P}; "
            "shrink the scope or its maximum degree"
        )
    uncolored = frozenset(uncolored)
    pair_edges = []
    fixed_edges = []
    for u, v in scope.edges:
        u_in = u in uncolored
        v_in = v in uncolored
        if u_in and v_in:
            pair_edges.append((u, v))
        elif u_in:
            fixed_edges.append((u, colors[v]))
        elif v_in:
            fixed_edges.append((v, colors[u]))
    counter = _SeedBoxCounter(p, palette, pair_edges, fixed_edges)

    nbits_half = max(1, (p - 1).bit_length())
    total_bits = 2 * nbits_half
    batch = max(1, math.floor((delta / 3.0) * math.log2(n))) if n > 1 else 1

    bits = []
    box = _seed_box(bits, nbits_half, p)
    e_initial = Fraction(
        counter.count(*box), (box[1] - box[0]) * (box[3] - box[2])
    )
    chain = []
    e_prev = e_initial
    while len(bits) < total_bits:
        width = min(batch, total_bits - len(bits))
        best_val = None
        best_e = None
        for cand in range(1 << width):
            cand_bits = bits + [(cand >> (width - 1 - j)) & 1 for j in range(width)]
            cand_box = _seed_box(cand_bits, nbits_half, p)
            if cand_box is None:
                continue
            area = (cand_box[1] - cand_box[0]) * (cand_box[3] - cand_box[2])
            e_val = Fraction(counter.count(*cand_box), area)
            if best_e is None or e_val < best_e:
                best_e = e_val
                best_val = cand
        # the law of total expectation over the non-empty candidate boxes
        # guarantees the minimum never exceeds the running expectation
        assert best_e is not None and best_e <= e_prev
        bits += [(best_val >> (width - 1 - j)) & 1 for j in range(width)]
        prefix_str = "".join(str(b) for b in bits)
        chain.append((len(bits), prefix_str, best_e))
        e_prev = best_e

    a = 0
    for bit in bits[:nbits_half]:
        a = (a << 1) | bit
    b = 0
    for bit in bits[nbits_half:]:
        b = (b << 1) | bit
    y_final = counter.y_at(a, b)
    assert Fraction(y_final) == chain[-1][2]

    T = counter.T
    trial_colors = {u: int(T[(a * u + b) % p]) for u in uncolored}
    blocked = set()
    for u, v in pair_edges:
        if trial_colors[u] == trial_colors[v]:
            blocked.add(u)
            blocked.add(v)
    for u, c in fixed_edges:
        if trial_colors[u] == c:
            blocked.add(u)
    state = TrialState(
        x=x,
        palette=palette,
        prime=p,
        seed_bits=total_bits,
        fixed_prefix="".join(str(bb) for bb in bits),
        batch_size=batch,
        uncolored=uncolored,
    )
    trace = TrialTrace(
        state=state,
        u_size=len(uncolored),
        expectation_initial=e_initial,
        chain=tuple(chain),
        seed=(a, b),
        y_final=y_final,
        blocked=len(blocked),
    )
    return trace, trial_colors, blocked


def derand_run(scope, x, delta):
    """Repeat trials on the shrinking uncolored set until everyone is colored.

    Returns ``(colors, palette, traces)``.  Edgeless scopes are trivial: a
    single-slot palette and no trials.  The loop aborts with diagnostics if
    it ever exceeds 4*ceil(log2 n) trials, which the geometric shrink makes
    unreachable.
    """
    if x < 2:
        raise ValueError("x must be >= 2")
    n = scope.n
    if n == 0:
        return {}, 1, ()
    if scope.m == 0:
        return {v: 0 for v in range(n)}, 1, ()
    colors = {}
    uncolored = set(range(n))
    traces = []
    cap = max(1, 4 * math.ceil(math.log2(max(2, n))))
    while uncolored:
        if len(traces) >= cap:
            raise DerandFailure(
                f"uncolored set stalled at {len(uncolored)} nodes "
                f"after {len(traces)} trials"
            )
        trace, trial_colors, blocked = run_trial(scope, uncolored, colors, x, delta)
        for u in sorted(uncolored - blocked):
            colors[u] = trial_colors[u]
        uncolored &= blocked
        traces.append(trace)
    palette = 2 * x * max(scope.degrees)
    return colors, palette, tuple(traces)


def broadcast_depth(delta):
    """Depth of the simulated aggregation tree, charged per batch."""
    return max(1, math.ceil(2.0 / delta))


def rounds_charged(traces, delta):
    depth = broadcast_depth(delta)
    return sum(len(t.chain) * depth + 1 for t in traces)
