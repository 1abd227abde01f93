import math
import random

import pytest

from arbcolor.ampc import PipelineConfig
from arbcolor.coloring import (
    Coloring,
    HIGHEST,
    ImproperColoringError,
    LAYER_THEN_ID,
    LAYER_THEN_INITIAL_COLOR,
    SMALLEST,
    arb_linial_full,
    arb_linial_step,
    color_pipeline_1,
    color_pipeline_2,
    color_pipeline_3,
    color_pipeline_large_alpha,
    derand_color,
    is_proper,
    kw_reduce,
    linial_parameters,
    orient_by_partition,
    predicted_linial_palette,
    recolor_conflicts,
)
from arbcolor.graph import Graph, generate_forest_union
from arbcolor.partition import PartialBetaPartition, natural_partition

from conftest import box_expectation, collision_grid, path, star


def flat_partition(g, beta):
    return PartialBetaPartition(beta=beta, n=g.n, finite={v: 0 for v in range(g.n)})


def kahn_is_acyclic(out, n):
    indeg = [0] * n
    for v, lst in out.items():
        for w in lst:
            indeg[w] += 1
    queue = [v for v in range(n) if indeg[v] == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen == n


# -- orientation ---------------------------------------------------------------


def test_orient_star():
    g = star(5)
    p = natural_partition(g, 2)
    o = orient_by_partition(g, p, LAYER_THEN_ID)
    for leaf in range(5):
        assert o.out[leaf] == (5,)
    assert o.out[5] == ()
    assert o.max_out_degree() == 1


def test_orient_single_layer_is_id_dag():
    g = path(5)
    o = orient_by_partition(g, flat_partition(g, 2), LAYER_THEN_ID)
    for v, outs in o.out.items():
        assert all(w > v for w in outs)
    assert kahn_is_acyclic(o.out, g.n)


def test_orient_acyclic_on_random():
    for seed in range(6):
        g, cert = generate_forest_union(50, 2, seed)
        p = natural_partition(g, 2 * cert.value)
        o = orient_by_partition(g, p, LAYER_THEN_ID)
        assert kahn_is_acyclic(o.out, g.n)
        assert o.max_out_degree() <= p.beta


def test_orient_rejects_partial():
    g = star(5)
    p = PartialBetaPartition(beta=2, n=6, finite={0: 0})
    with pytest.raises(ValueError):
        orient_by_partition(g, p, LAYER_THEN_ID)


def test_orient_by_initial_color():
    g = path(4)
    initial = Coloring(color={0: 1, 1: 0, 2: 1, 3: 0}, palette=2)
    o = orient_by_partition(g, flat_partition(g, 2), LAYER_THEN_INITIAL_COLOR, initial)
    assert o.out[1] == (0, 2) and o.out[3] == (2,)
    assert kahn_is_acyclic(o.out, g.n)


def test_orient_by_initial_color_rejects_conflict():
    g = path(3)
    bad = Coloring(color={0: 1, 1: 1, 2: 0}, palette=2)
    with pytest.raises(ImproperColoringError):
        orient_by_partition(g, flat_partition(g, 2), LAYER_THEN_INITIAL_COLOR, bad)


# -- polynomial reduction --------------------------------------------------------


def test_linial_parameters_hand_case():
    assert linial_parameters(4, 1) == (5, 1)


def test_step_identity_when_palette_small():
    # constant polynomials: evaluation point 0 works and colors are kept
    g = path(4)
    o = orient_by_partition(g, flat_partition(g, 2), LAYER_THEN_ID)
    cur = Coloring(color={0: 0, 1: 1, 2: 2, 3: 3}, palette=4)
    # max out-degree is 1, so q=5, d=1
    out = arb_linial_step(o, cur)
    assert out.color == cur.color
    assert out.palette == 25


def test_step_isolated_nodes():
    g = Graph(4, [])
    o = orient_by_partition(g, flat_partition(g, 1), LAYER_THEN_ID)
    cur = Coloring(color={v: v for v in range(4)}, palette=4)
    out = arb_linial_step(o, cur)
    assert is_proper(g, out)


def test_step_proper_on_oriented_path():
    rnd = random.Random(5)
    g = path(40)
    o = orient_by_partition(g, flat_partition(g, 2), LAYER_THEN_ID)
    colors = {}
    for v in range(g.n):
        c = rnd.randrange(40)
        while v and colors[v - 1] == c:
            c = rnd.randrange(40)
        colors[v] = c
    cur = Coloring(color=colors, palette=40)
    out = arb_linial_step(o, cur)
    assert is_proper(g, out)
    q, _ = linial_parameters(40, 1)
    assert out.palette == q * q


def test_step_rejects_improper_input():
    g = path(3)
    o = orient_by_partition(g, flat_partition(g, 2), LAYER_THEN_ID)
    bad = Coloring(color={0: 1, 1: 1, 2: 0}, palette=2)
    with pytest.raises(ImproperColoringError):
        arb_linial_step(o, bad)


def test_step_proper_on_random_orientations():
    for seed in range(5):
        g, cert = generate_forest_union(60, 2, seed)
        p = natural_partition(g, 2 * cert.value)
        o = orient_by_partition(g, p, LAYER_THEN_ID)
        cur = Coloring(color={v: v for v in range(g.n)}, palette=g.n)
        out = arb_linial_step(o, cur)
        assert is_proper(g, out)


def test_full_reduction_path():
    g = path(256)
    o = orient_by_partition(g, flat_partition(g, 1), LAYER_THEN_ID)
    colored, steps = arb_linial_full(o)
    assert is_proper(g, colored)
    assert colored.palette <= 49
    assert steps >= 1


def test_full_reduction_single_node():
    g = Graph(1, [])
    o = orient_by_partition(g, flat_partition(g, 1), LAYER_THEN_ID)
    colored, steps = arb_linial_full(o)
    assert colored.palette == 1 and steps == 0


def test_full_reduction_fixpoint_depth():
    # the recipe converges in a handful of steps even from a huge palette
    for beta in (1, 4, 32):
        m = 10**6
        steps = 0
        while True:
            q, _ = linial_parameters(m, beta)
            if q * q >= m:
                break
            m = q * q
            steps += 1
        assert steps <= 10
        assert predicted_linial_palette(10**6, beta) == m


# -- block-halving reduction -----------------------------------------------------


def test_kw_matching_hand_case():
    g = Graph(6, [(0, 1), (2, 3), (4, 5)])
    o = orient_by_partition(g, flat_partition(g, 1), LAYER_THEN_ID)
    cur = Coloring(color={0: 0, 1: 5, 2: 2, 3: 3, 4: 4, 5: 1}, palette=6)
    reduced, subrounds = kw_reduce(g, o, cur, 1)
    assert reduced.palette == 2
    assert subrounds <= 4
    assert is_proper(g, reduced)


def test_kw_identity_when_small():
    g = Graph(3, [(0, 1)])
    o = orient_by_partition(g, flat_partition(g, 1), LAYER_THEN_ID)
    cur = Coloring(color={0: 0, 1: 1, 2: 0}, palette=2)
    reduced, subrounds = kw_reduce(g, o, cur, 1)
    assert subrounds == 0 and reduced.color == cur.color


def test_kw_rejects_high_degree():
    g = star(3)
    o = orient_by_partition(g, flat_partition(g, 3), LAYER_THEN_ID)
    cur = Coloring(color={v: v for v in range(4)}, palette=4)
    with pytest.raises(ValueError):
        kw_reduce(g, o, cur, 1)


def test_kw_on_layer_subgraphs():
    from arbcolor.graph import induced_subgraph

    for seed in range(4):
        g, cert = generate_forest_union(120, 2, seed)
        beta = 3 * cert.value
        part = natural_partition(g, beta)
        layers = {}
        for v, l in part.finite.items():
            layers.setdefault(l, []).append(v)
        for nodes in layers.values():
            sub, _ = induced_subgraph(g, sorted(nodes))
            o = orient_by_partition(sub, flat_partition(sub, beta), LAYER_THEN_ID)
            colored, _ = arb_linial_full(o)
            reduced, subrounds = kw_reduce(sub, o, colored, beta)
            assert reduced.palette <= beta + 1
            assert is_proper(sub, reduced)
            if colored.palette > beta + 1:
                budget = (beta + 1) * math.ceil(
                    math.log2(colored.palette / (beta + 1))
                )
                assert subrounds <= max(budget, beta + 1)


def test_kw_subround_budget():
    g = Graph(8, [(i, i + 1) for i in range(0, 8, 2)])
    o = orient_by_partition(g, flat_partition(g, 1), LAYER_THEN_ID)
    cur = Coloring(color={v: v for v in range(8)}, palette=8)
    reduced, subrounds = kw_reduce(g, o, cur, 1)
    assert is_proper(g, reduced) and reduced.palette == 2
    assert subrounds <= 2 * math.ceil(math.log2(8 / 2))


# -- conflict recoloring ---------------------------------------------------------


def test_recolor_cross_layer_conflict():
    # square with layers {0,1 low; 2,3 high}; the cross edges carry equal
    # initial colors, recoloring must separate them
    g = Graph(4, [(0, 2), (1, 3), (0, 1), (2, 3)])
    p = PartialBetaPartition(beta=2, n=4, finite={0: 0, 1: 0, 2: 1, 3: 1})
    initial = Coloring(color={0: 0, 1: 1, 2: 0, 3: 1}, palette=3)
    out = recolor_conflicts(g, p, initial, HIGHEST)
    assert is_proper(g, out)
    assert out.palette == 3
    assert max(out.color.values()) <= 2


def test_recolor_single_layer():
    g = path(6)
    p = flat_partition(g, 2)
    initial = Coloring(color={v: v % 3 for v in range(6)}, palette=3)
    out = recolor_conflicts(g, p, initial, HIGHEST)
    assert is_proper(g, out)


def test_recolor_smallest_rule():
    for seed in range(4):
        g, cert = generate_forest_union(80, 2, seed)
        beta = 3 * cert.value
        part = natural_partition(g, beta)
        rnd = random.Random(seed)
        # random per-layer-proper initial with a large palette
        initial = {}
        for v in range(g.n):
            while True:
                c = rnd.randrange(4 * beta)
                if all(
                    initial.get(u) != c
                    for u in g.adjacency[v]
                    if part.finite[u] == part.finite[v]
                ):
                    initial[v] = c
                    break
        out = recolor_conflicts(
            g, part, Coloring(color=initial, palette=4 * beta), SMALLEST
        )
        assert is_proper(g, out)
        assert out.palette == beta + 1


def test_recolor_rejects_bad_inputs():
    g = path(3)
    p = PartialBetaPartition(beta=2, n=3, finite={0: 0})
    initial = Coloring(color={0: 0, 1: 1, 2: 0}, palette=2)
    with pytest.raises(ValueError):
        recolor_conflicts(g, p, initial)
    full = flat_partition(g, 2)
    bad = Coloring(color={0: 0, 1: 0, 2: 1}, palette=2)
    with pytest.raises(ImproperColoringError):
        recolor_conflicts(g, full, bad)
    with pytest.raises(ValueError):
        recolor_conflicts(g, full, initial, pick="WEIRD")


# -- derandomized trials ----------------------------------------------------------


def test_derand_single_edge():
    g = Graph(2, [(0, 1)])
    res = derand_color(g, 2)
    assert res.coloring.palette == 4
    assert len(res.traces) == 1
    assert is_proper(g, res.coloring)
    assert res.traces[0].y_final == 0


def test_derand_edgeless():
    g = Graph(5, [])
    res = derand_color(g, 2)
    assert res.coloring.palette == 1
    assert set(res.coloring.color.values()) == {0}
    assert res.traces == ()


def test_derand_expectation_chain_matches_grid_oracle():
    g, _ = generate_forest_union(24, 1, 9)
    res = derand_color(g, 2)
    final = res.coloring.color
    for trace in res.traces:
        u_set = set(trace.state.uncolored)
        p = trace.state.prime
        palette = trace.state.palette
        nbits = trace.state.seed_bits // 2
        grid = collision_grid(g, u_set, final, p, palette)
        prev = box_expectation(grid, p, [], nbits)
        assert trace.expectation_initial == prev
        for _, prefix_str, e_val in trace.chain:
            bits = [int(ch) for ch in prefix_str]
            e_grid = box_expectation(grid, p, bits, nbits)
            assert e_val == e_grid
            assert e_val <= prev
            prev = e_val


def test_derand_shrink_and_properness():
    for seed in (3, 14):
        g, _ = generate_forest_union(48, 2, seed)
        x = 2
        res = derand_color(g, x)
        assert is_proper(g, res.coloring)
        assert res.coloring.palette == 2 * x * max(g.degrees)
        u = g.n
        for trace in res.traces:
            assert trace.u_size == u
            assert trace.blocked <= 2 * trace.y_final
            nxt = trace.blocked
            assert nxt <= math.ceil(1.25 * u / x)
            u = nxt
        assert u == 0
        assert len(res.traces) <= math.ceil(math.log2(max(2, g.n))) + 3


def test_derand_rejects_small_x():
    with pytest.raises(ValueError):
        derand_color(path(3), 1)


def test_derand_first_trial_expectation_bound():
    # every edge collides with probability at most ceil(p/K)^2 * K / p^2
    # under a uniform seed, so the first trial's exact expectation obeys
    # the family bound m * (1/K)(1 + K/p)^2
    from fractions import Fraction

    for seed in (1, 8):
        g, _ = generate_forest_union(40, 2, seed)
        res = derand_color(g, 2)
        trace = res.traces[0]
        p, K = trace.state.prime, trace.state.palette
        ceil_pk = -(-p // K)
        per_edge = Fraction(ceil_pk**2 * K, p * p)
        assert trace.expectation_initial <= g.m * per_edge
        assert per_edge <= Fraction(1, K) * (1 + Fraction(K, p)) ** 2


# -- pipelines ---------------------------------------------------------------------


def _cfg(alpha, x=8):
    return PipelineConfig(beta=1, x_override=x, alpha_hint=alpha, epsilon=1.0)


def test_pipeline1_proper():
    for seed in range(4):
        g, cert = generate_forest_union(90, 2, seed)
        res = color_pipeline_1(g, _cfg(cert.value))
        assert is_proper(g, res.coloring)
        beta = math.ceil(cert.value ** 2)
        q, _ = linial_parameters(max(1, g.n), beta)
        assert res.coloring.palette <= max(q * q, predicted_linial_palette(g.n, beta))


def test_pipeline2_proper():
    for seed in range(4):
        g, cert = generate_forest_union(90, 3, seed)
        res = color_pipeline_2(g, _cfg(cert.value))
        assert is_proper(g, res.coloring)
        assert res.coloring.palette <= predicted_linial_palette(
            g.n, math.ceil(3 * cert.value)
        )


def test_pipeline3_palette_and_properness():
    for seed in range(4):
        g, cert = generate_forest_union(110, 2, seed)
        res = color_pipeline_3(g, _cfg(cert.value))
        assert is_proper(g, res.coloring)
        assert res.coloring.palette == math.ceil(3 * cert.value) + 1


def test_pipeline3_star():
    res = color_pipeline_3(star(5), _cfg(1, x=4))
    assert is_proper(star(5), res.coloring)
    assert res.coloring.palette <= 4


def test_pipeline_large_linear():
    for seed in range(3):
        g, cert = generate_forest_union(72, 3, seed)
        res = color_pipeline_large_alpha(g, _cfg(cert.value), "LINEAR")
        assert is_proper(g, res.coloring)
        assert res.coloring.palette == math.ceil(3 * cert.value) + 1
        derand_phase = res.phases[1]
        assert derand_phase["pre_recolor_conflicts"] is not None


def test_pipeline_large_poly_disjoint_palettes():
    g, cert = generate_forest_union(64, 2, 11)
    res = color_pipeline_large_alpha(g, _cfg(cert.value), "POLY")
    assert is_proper(g, res.coloring)
    part = res.partition
    # cross-layer edges get colors from disjoint blocks by construction
    for u, v in g.edges:
        if part.finite[u] != part.finite[v]:
            assert res.coloring.color[u] != res.coloring.color[v]


def test_pipeline_large_poly_edgeless():
    g = Graph(6, [])
    res = color_pipeline_large_alpha(g, _cfg(1, x=4), "POLY")
    assert res.coloring.palette == 1


def test_pipelines_empty_graph():
    g = Graph(0, [])
    for fn in (color_pipeline_1, color_pipeline_2, color_pipeline_3):
        res = fn(g, _cfg(1, x=4))
        assert res.coloring.palette == 1
    res = color_pipeline_large_alpha(g, _cfg(1, x=4), "LINEAR")
    assert res.coloring.palette == 1


def test_pipeline_single_node():
    g = Graph(1, [])
    res = color_pipeline_2(g, _cfg(1, x=4))
    assert res.coloring.palette == 1
    assert is_proper(g, res.coloring)


def test_pipelines_deterministic():
    g, cert = generate_forest_union(60, 2, 5)
    a = color_pipeline_3(g, _cfg(cert.value))
    b = color_pipeline_3(g, _cfg(cert.value))
    assert a.coloring.color == b.coloring.color
    assert a.rounds_charged == b.rounds_charged
