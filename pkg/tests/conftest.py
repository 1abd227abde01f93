import random
from fractions import Fraction

import numpy as np
import pytest

from arbcolor.graph import Graph, generate_forest_union


def star(leaves):
    """K_{1,leaves} with the center as the highest id, leaves 0..leaves-1."""
    return Graph(leaves + 1, [(i, leaves) for i in range(leaves)])


def path(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def seeded_instances(count, n_range, alpha_range, seed=1234):
    """Deterministic list of (graph, certificate) pairs for sweeps."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randrange(*n_range)
        alpha = rng.randrange(*alpha_range)
        out.append(generate_forest_union(n, alpha, rng.getrandbits(32)))
    return out


@pytest.fixture
def rng():
    return random.Random(99)


def collision_grid(scope, uncolored, colors, p, palette):
    """Independent oracle for the derandomizer: the full (a, b) grid of
    monochromatic-edge counts, materialized by exhaustive enumeration."""
    A = np.arange(p, dtype=np.int64)
    T = A % palette
    Y = np.zeros((p, p), dtype=np.int64)
    for u, v in scope.edges:
        u_in, v_in = u in uncolored, v in uncolored
        if not (u_in or v_in):
            continue
        Hu = T[(np.add.outer(A * u, A)) % p]
        Hv = T[(np.add.outer(A * v, A)) % p]
        if u_in and v_in:
            Y += Hu == Hv
        elif u_in:
            Y += Hu == colors[v]
        else:
            Y += Hv == colors[u]
    return Y


def box_expectation(Y, p, prefix, nbits):
    """Mean of the grid over the seed box a bit prefix pins down."""

    def interval(bits):
        base = 0
        for b in bits:
            base = (base << 1) | b
        lo = base << (nbits - len(bits))
        hi = min((base + 1) << (nbits - len(bits)), p)
        return lo, hi

    a_lo, a_hi = interval(prefix[:nbits])
    b_lo, b_hi = interval(prefix[nbits:])
    box = Y[a_lo:a_hi, b_lo:b_hi]
    return Fraction(int(box.sum()), box.size)


def grid_box_expectation(scope, uncolored, colors, p, palette, prefix, nbits):
    Y = collision_grid(scope, uncolored, colors, p, palette)
    return box_expectation(Y, p, prefix, nbits)
