import json
import math

import pytest

from arbcolor.ampc import (
    FailedToProgress,
    HYBRID,
    LCA_PIPELINE,
    PEEL,
    PipelineConfig,
    guess_arboricity_pipeline,
    partition_pipeline,
    partition_size_cap,
    peel_pipeline,
    pipeline_report_json,
    shrink_factor,
    shrink_report,
)
from arbcolor.graph import Graph, generate_forest_union
from arbcolor.partition import natural_partition, validate_partition

from conftest import complete, path, star


def test_config_validation():
    with pytest.raises(ValueError):
        PipelineConfig(beta=3, delta=1.2)
    with pytest.raises(ValueError):
        PipelineConfig(beta=3, c=6.0)
    with pytest.raises(ValueError):
        PipelineConfig(beta=3, epsilon=0.0)
    with pytest.raises(ValueError):
        PipelineConfig(beta=0)


def test_config_x_resolution():
    cfg = PipelineConfig(beta=3)
    assert cfg.resolve_x(2**28) == 2**2  # (2^28)^(1/14)
    assert cfg.resolve_x(10) == 2  # clamped at the floor
    assert PipelineConfig(beta=3, x_override=16).resolve_x(10) == 16


# -- peeling -------------------------------------------------------------------


def test_peel_star():
    res = peel_pipeline(star(5), 2)
    assert res.ledger.rounds == 2
    assert res.partition.finite == {0: 0, 1: 0, 2: 0, 3: 0, 4: 0, 5: 1}
    assert res.mode == PEEL


def test_peel_path():
    res = peel_pipeline(path(4), 2)
    assert res.ledger.rounds == 1
    assert set(res.partition.finite.values()) == {0}


def test_peel_fails_on_dense():
    with pytest.raises(FailedToProgress):
        peel_pipeline(complete(4), 2)


def test_peel_equals_natural():
    for seed in range(12):
        g, cert = generate_forest_union(80 + 10 * seed, 1 + seed % 4, seed)
        beta = 2 * cert.value + seed % 3
        res = peel_pipeline(g, beta)
        nat = natural_partition(g, beta)
        assert res.partition.finite == nat.finite


# -- sweep pipeline ------------------------------------------------------------


def test_pipeline_forest():
    g, _ = generate_forest_union(1000, 1, 5)
    cfg = PipelineConfig(beta=3, x_override=8, alpha_hint=1)
    res = partition_pipeline(g, cfg)
    assert res.mode == LCA_PIPELINE
    assert res.partition.is_full
    assert validate_partition(g, res.partition).valid


def test_pipeline_edgeless():
    g = Graph(7, [])
    res = partition_pipeline(g, PipelineConfig(beta=2, x_override=4))
    assert res.ledger.rounds == 1
    assert set(res.partition.finite.values()) == {0}


def test_pipeline_k4_fails():
    with pytest.raises(FailedToProgress) as exc:
        partition_pipeline(complete(4), PipelineConfig(beta=2, x_override=8))
    assert exc.value.diagnostics["min_remaining_degree"] == 3


def test_pipeline_empty_graph():
    res = partition_pipeline(Graph(0, []), PipelineConfig(beta=2, x_override=4))
    assert res.partition.is_full and res.partition.n == 0


def test_pipeline_offsets_strictly_increase():
    g, _ = generate_forest_union(600, 3, 9)
    cfg = PipelineConfig(beta=9, x_override=8, alpha_hint=3)
    res = partition_pipeline(g, cfg)
    offsets = res.per_round_layer_offsets
    assert offsets == sorted(set(offsets))
    assert res.partition.is_full
    assert validate_partition(g, res.partition).valid


def test_pipeline_size_within_per_round_allowance():
    g, _ = generate_forest_union(500, 2, 4)
    cfg = PipelineConfig(beta=6, x_override=16, alpha_hint=2)
    res = partition_pipeline(g, cfg)
    kinds = [r["kind"] for r in res.ledger.per_round]
    assert res.partition.size <= partition_size_cap(16, 6, kinds)


def test_pipeline_nodes_remaining_strictly_decreasing():
    g, _ = generate_forest_union(400, 2, 8)
    res = partition_pipeline(g, PipelineConfig(beta=6, x_override=8))
    remaining = [r["nodes_remaining"] for r in res.ledger.per_round]
    assert all(a > b for a, b in zip(remaining, remaining[1:]))
    assert remaining[-1] == 0


def test_pipeline_reads_within_budget_flags():
    g, _ = generate_forest_union(300, 2, 15)
    res = partition_pipeline(g, PipelineConfig(beta=6, x_override=8))
    assert all(r["reads_within_budget"] for r in res.ledger.per_round)


def test_pipeline_x_relation_asserted_when_derived():
    g, _ = generate_forest_union(5000, 2, 3)
    cfg = PipelineConfig(beta=6, delta=0.9, c=6.5)
    assert cfg.natural_x(g.n) >= 2
    res = partition_pipeline(g, cfg)
    assert res.ledger.x_relation_holds is True
    assert res.partition.is_full


def test_hybrid_fallback_wiring(monkeypatch):
    # a sweep can only stall when peeling stalls too (every node of degree
    # <= beta certifies its own layer 0), so the fallback is reached by
    # stubbing one stalled sweep and checking the peel tail takes over
    import arbcolor.ampc as ampc_mod
    from arbcolor.partition import PartialBetaPartition

    g, _ = generate_forest_union(40, 1, 3)
    real_sweep = ampc_mod.lca_sweep
    calls = {"n": 0}

    def stalled_once(graph, x, beta):
        calls["n"] += 1
        if calls["n"] == 1:
            out = real_sweep(graph, x, beta)
            empty = PartialBetaPartition(beta=beta, n=graph.n, finite={})
            return {
                v: type(o)(proof=empty, layer_of_root=None, ledger=o.ledger)
                for v, o in out.items()
            }
        return real_sweep(graph, x, beta)

    monkeypatch.setattr(ampc_mod, "lca_sweep", stalled_once)
    res = partition_pipeline(g, PipelineConfig(beta=3, x_override=4))
    assert res.mode == HYBRID
    assert res.partition.is_full
    assert validate_partition(g, res.partition).valid
    # the stalled sweep is still charged as a round before the peel tail
    assert res.ledger.per_round[0]["kind"] == "lca"
    assert res.ledger.per_round[0]["nodes_remaining"] == g.n
    assert all(r["kind"] == "peel" for r in res.ledger.per_round[1:])


# -- arboricity guessing -------------------------------------------------------


def test_guess_on_forest():
    g, _ = generate_forest_union(300, 1, 2)
    cfg = PipelineConfig(beta=1, x_override=8)
    out = guess_arboricity_pipeline(g, cfg)
    assert out.phase1_estimate == 2
    assert out.alpha_estimate <= 4
    assert out.result.partition.is_full
    assert validate_partition(g, out.result.partition).valid


def test_guess_single_edge():
    g = Graph(2, [(0, 1)])
    out = guess_arboricity_pipeline(g, PipelineConfig(beta=1, x_override=4))
    assert out.phase1_estimate == 2


def test_guess_below_square():
    for alpha in (2, 4):
        g, cert = generate_forest_union(400, alpha, 31)
        cfg = PipelineConfig(beta=1, x_override=8)
        out = guess_arboricity_pipeline(g, cfg)
        assert out.phase1_estimate < max(4, cert.value**2)
        assert out.result.partition.is_full


# -- shrink report -------------------------------------------------------------


def test_shrink_factor_vacuous_when_x_small():
    assert shrink_factor(2, 6, 2) >= 1.0


def test_shrink_report_forest_union():
    g, _ = generate_forest_union(4096, 2, 6)
    cfg = PipelineConfig(beta=10, x_override=64, epsilon=3.0, alpha_hint=2)
    rep = shrink_report(g, cfg, 2)
    assert not rep["vacuous"]
    assert rep["flagged_rounds"] == 0
    assert rep["rows"][0]["nodes_start"] == 4096


def test_shrink_report_requires_slack():
    g, _ = generate_forest_union(64, 2, 6)
    with pytest.raises(ValueError):
        shrink_report(g, PipelineConfig(beta=4, x_override=8), 2)


# -- reports -------------------------------------------------------------------


def test_report_json_stable():
    g, _ = generate_forest_union(50, 1, 8)
    cfg = PipelineConfig(beta=3, x_override=4, alpha_hint=1)
    res = partition_pipeline(g, cfg)
    blob = pipeline_report_json(g, cfg, res)
    data = json.loads(blob)
    assert list(data)[:6] == ["n", "m", "beta", "x", "delta", "c"]
    assert data["valid"] is True
    assert blob == pipeline_report_json(g, cfg, partition_pipeline(g, cfg))


def test_round_budget_formula():
    cfg = PipelineConfig(beta=6, epsilon=1.0)
    budget = cfg.round_budget(2)
    k = math.log(7) / math.log(1.5)
    assert budget == math.ceil(k / cfg.d_constant) + 4
    assert PipelineConfig(beta=4).round_budget(2) is None
