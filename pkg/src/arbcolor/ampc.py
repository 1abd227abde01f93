"""Simulated low-space parallel execution of the partition pipeline.

The machine model is simulated sequentially with an accounting ledger:
one pipeline round charges one synchronous round, machine reads are the
per-query probe counts, and machine space is ``ceil(n**delta)`` words.
Each round runs the per-node exploration game on the remaining subgraph,
merges all proof partitions by pointwise minimum, offsets the new layers
above everything assigned so far, and recurses on the nodes still at
infinity.  A round that assigns nothing falls back to plain peeling
(degree <= beta removal), which is guaranteed to progress whenever
beta >= 2 * arboricity.

At desk scale the theoretical coupling x = n**(delta/c) gives tiny x, so
the exploration budget x may be overridden; the ledger then reports (not
asserts) the read/space relation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .coingame import layer_threshold, lca_sweep
from .graph import induced_subgraph
from .partition import PartialBetaPartition, min_merge, validate_partition

LCA_PIPELINE = "LCA_PIPELINE"
PEEL = "PEEL"
HYBRID = "HYBRID"


class FailedToProgress(RuntimeError):
    """No rule could assign a layer to any remaining node."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


@dataclass(frozen=True)
class PipelineConfig:
    beta: int
    delta: float = 0.5
    c: float = 7.0
    epsilon: float = 1.0
    x_override: int | None = None
    alpha_hint: int | None = None

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")
        if self.c <= 6.0:
            raise ValueError("c must exceed 6")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if self.beta < 1:
            raise ValueError("beta must be >= 1")

    def space_budget(self, n):
        return max(1, math.ceil(n**self.delta))

    def natural_x(self, n):
        if n <= 0:
            return 0
        # nudge past float error so exact powers land on their integer
        return math.floor(n ** (self.delta / self.c) + 1e-9)

    def resolve_x(self, n):
        """Exploration budget: override if given, else max(2, floor(n**(d/c)))."""
        if self.x_override is not None:
            if self.x_override < 2:
                raise ValueError("x override must be >= 2")
            return self.x_override
        return max(2, self.natural_x(n))

    @property
    def d_constant(self):
        r = self.delta / self.c
        return r - r * r

    def round_budget(self, alpha):
        """Round allowance for one run: the analysis round count plus slack."""
        beta = self.beta
        if beta <= 2 * alpha:
            return None  # the drop rate bound is vacuous
        k = math.log(beta + 1) / math.log(beta / (2 * alpha))
        return math.ceil(k / self.d_constant) + 4


@dataclass
class RoundLedger:
    space_budget: int
    x: int
    per_round: list = field(default_factory=list)
    x_relation_holds: bool | None = None  # x**6 <= n**delta when x is derived

    @property
    def rounds(self):
        return len(self.per_round)

    def charge(self, kind, reads, writes, nodes_start, nodes_remaining, offset):
        self.per_round.append(
            {
                "kind": kind,
                "max_machine_reads": reads,
                "max_machine_writes": writes,
                "nodes_start": nodes_start,
                "nodes_remaining": nodes_remaining,
                "offset": offset,
                "reads_within_budget": reads <= max(self.space_budget, self.x**6),
            }
        )

    @property
    def max_machine_reads(self):
        return max((r["max_machine_reads"] for r in self.per_round), default=0)


@dataclass
class PipelineResult:
    partition: PartialBetaPartition
    ledger: RoundLedger
    per_round_layer_offsets: list
    mode: str


def peel_pipeline(g, beta):
    """Layer-by-layer peeling: round i assigns layer i to every node of
    degree at most beta in the current remainder, then removes it.

    One round per layer.  Degrees are recounted from scratch against the
    surviving set each round, deliberately not sharing the incremental
    counter mechanics of the induced-partition peeler, so the two routes
    check each other.
    """
    if beta < 1:
        raise ValueError("beta must be >= 1")
    ledger = RoundLedger(space_budget=g.n, x=2)
    finite = {}
    offsets = []
    alive = set(range(g.n))
    layer = 0
    while alive:
        deg = {v: 0 for v in alive}
        for v in alive:
            cnt = 0
            for u in g.adjacency[v]:
                if u in alive:
                    cnt += 1
            deg[v] = cnt
        drop = sorted(v for v in alive if deg[v] <= beta)
        if not drop:
            raise FailedToProgress(
                "no node of degree <= beta remains",
                diagnostics={
                    "beta": beta,
                    "nodes_remaining": len(alive),
                    "min_remaining_degree": min(deg.values()),
                },
            )
        for v in drop:
            finite[v] = layer
        start = len(alive)
        alive.difference_update(drop)
        reads = max(min(g.degrees[v], beta + 1) + 1 for v in drop)
        ledger.charge(
            kind="peel",
            reads=reads,
            writes=1,
            nodes_start=start,
            nodes_remaining=len(alive),
            offset=layer,
        )
        offsets.append(layer)
        layer += 1
    partition = PartialBetaPartition(beta=beta, n=g.n, finite=finite)
    return PipelineResult(
        partition=partition,
        ledger=ledger,
        per_round_layer_offsets=offsets,
        mode=PEEL,
    )


def partition_pipeline(g, cfg):
    """Iterated sweep-merge-offset until every node has a layer.

    Round i sweeps the remaining subgraph with per-node queries, merges all
    proofs by pointwise minimum, lifts the new finite layers above the
    current global maximum, and recurses on the infinity nodes.  If a sweep
    round assigns nothing the remainder is finished by peeling (HYBRID); if
    even peeling cannot move, the failure carries diagnostics.
    """
    n = g.n
    x = cfg.resolve_x(n)
    ledger = RoundLedger(space_budget=cfg.space_budget(n), x=x)
    if cfg.x_override is None and cfg.natural_x(n) >= 2:
        ledger.x_relation_holds = x**6 <= n**cfg.delta
    finite = {}
    offsets = []
    mode = LCA_PIPELINE
    current = g
    orig_ids = list(range(n))
    offset = 0
    if n == 0:
        return PipelineResult(
            partition=PartialBetaPartition(beta=cfg.beta, n=0, finite={}),
            ledger=ledger,
            per_round_layer_offsets=offsets,
            mode=mode,
        )
    while current.n > 0:
        sweep = lca_sweep(current, x, cfg.beta)
        merged = min_merge([out.proof for out in sweep.values()])
        if not merged.finite:
            # the stalled sweep still consumed a round of machine work
            ledger.charge(
                kind="lca",
                reads=max(
                    out.ledger.adjacency_probes + out.ledger.degree_probes
                    for out in sweep.values()
                ),
                writes=0,
                nodes_start=current.n,
                nodes_remaining=current.n,
                offset=offset,
            )
            mode = HYBRID
            try:
                tail = peel_pipeline(current, cfg.beta)
            except FailedToProgress as exc:
                exc.diagnostics.update(
                    {"completed_layers": offset, "stalled_at_nodes": current.n}
                )
                raise
            for u, layer in tail.partition.finite.items():
                finite[orig_ids[u]] = layer + offset
            for rec in tail.ledger.per_round:
                ledger.charge(
                    kind="peel",
                    reads=rec["max_machine_reads"],
                    writes=rec["max_machine_writes"],
                    nodes_start=rec["nodes_start"],
                    nodes_remaining=rec["nodes_remaining"],
                    offset=offset + rec["offset"],
                )
                offsets.append(offset + rec["offset"])
            break
        reads = max(
            out.ledger.adjacency_probes + out.ledger.degree_probes
            for out in sweep.values()
        )
        writes = max(len(out.proof.finite) for out in sweep.values())
        for u, layer in merged.finite.items():
            finite[orig_ids[u]] = layer + offset
        remaining = sorted(set(range(current.n)) - merged.finite.keys())
        ledger.charge(
            kind="lca",
            reads=reads,
            writes=writes,
            nodes_start=current.n,
            nodes_remaining=len(remaining),
            offset=offset,
        )
        offsets.append(offset)
        offset = max(finite.values()) + 1
        if not remaining:
            break
        sub, mapping = induced_subgraph(current, remaining)
        orig_ids = [orig_ids[mapping.to_old(v)] for v in range(sub.n)]
        current = sub
    partition = PartialBetaPartition(beta=cfg.beta, n=n, finite=finite)
    return PipelineResult(
        partition=partition,
        ledger=ledger,
        per_round_layer_offsets=offsets,
        mode=mode,
    )


@dataclass(frozen=True)
class GuessOutcome:
    result: PipelineResult
    alpha_estimate: int
    phase1_estimate: int
    rounds_charged: int
    tried: tuple


def _beta_for(alpha, epsilon):
    return math.ceil((2 + epsilon) * alpha)


def _attempt(g, cfg, alpha):
    """Run one guess; success means the sweep pipeline finished on its own
    within the round allowance for this guess."""
    trial_cfg = replace(cfg, beta=_beta_for(alpha, cfg.epsilon), alpha_hint=alpha)
    budget = trial_cfg.round_budget(alpha)
    try:
        result = partition_pipeline(g, trial_cfg)
    except FailedToProgress:
        return None, False
    ok = result.mode == LCA_PIPELINE and (
        budget is None or result.ledger.rounds <= budget
    )
    return result, ok


def guess_arboricity_pipeline(g, cfg, eps_refine=1.0):
    """Partitioning without knowing the arboricity.

    Phase 1 tries the double-exponential guesses 2, 4, 16, 256, ... one by
    one and keeps the first that succeeds; that estimate is below the square
    of the true arboricity.  Phase 2 refines geometrically from its square
    root, running all refinements and returning the smallest that succeeds;
    the refinements are charged as parallel executions (their max), added to
    the phase-1 total.
    """
    if g.n == 0:
        raise ValueError("graph must be nonempty")
    if eps_refine <= 0:
        raise ValueError("eps_refine must be positive")
    tried = []
    phase1_rounds = 0
    a_k = None
    base = None
    i = 0
    while True:
        alpha = 2 ** (2**i)
        result, ok = _attempt(g, cfg, alpha)
        rounds = result.ledger.rounds if result is not None else 0
        phase1_rounds += rounds
        tried.append(("phase1", alpha, ok, rounds))
        if ok:
            a_k = alpha
            base = result
            break
        i += 1
        if alpha >= g.n:
            raise FailedToProgress(
                "no arboricity guess succeeded",
                diagnostics={"last_alpha": alpha, "n": g.n},
            )
    root = math.sqrt(a_k)
    j_max = math.ceil(math.log(root) / math.log(1 + eps_refine)) if root > 1 else 0
    best_alpha = a_k
    best = base
    phase2_rounds = 0
    for j in range(j_max + 1):
        alpha_j = math.ceil(root * (1 + eps_refine) ** j)
        result, ok = _attempt(g, cfg, alpha_j)
        rounds = result.ledger.rounds if result is not None else 0
        phase2_rounds = max(phase2_rounds, rounds)
        tried.append(("phase2", alpha_j, ok, rounds))
        if ok and alpha_j < best_alpha:
            best_alpha = alpha_j
            best = result
    return GuessOutcome(
        result=best,
        alpha_estimate=best_alpha,
        phase1_estimate=a_k,
        rounds_charged=phase1_rounds + phase2_rounds,
        tried=tuple(tried),
    )


def shrink_factor(x, beta, alpha):
    """Per-round survivor fraction 2**(1 - log2(x) / log_{beta/(2a)}(beta+1))."""
    if beta <= 2 * alpha:
        return math.inf
    denom = math.log(beta + 1) / math.log(beta / (2 * alpha))
    return 2.0 ** (1.0 - math.log2(x) / denom)


def shrink_report(g, cfg, alpha_cert):
    """Per-round survivor counts against the theoretical drop rate.

    Rows cover the sweep rounds of one pipeline run; each is flagged when
    the actual remainder exceeds n * f**(i+1).  When f >= 1 the cap is at
    least n and the whole report is marked vacuous.
    """
    if cfg.beta < (2 + cfg.epsilon) * alpha_cert:
        raise ValueError("beta must be at least (2+epsilon) * alpha")
    result = partition_pipeline(g, cfg)
    x = cfg.resolve_x(g.n)
    f = shrink_factor(x, cfg.beta, alpha_cert)
    vacuous = f >= 1.0
    rows = []
    flagged = 0
    for i, rec in enumerate(result.ledger.per_round):
        if rec["kind"] != "lca":
            continue
        cap = g.n * f ** (i + 1)
        exceeded = (not vacuous) and rec["nodes_remaining"] > cap
        flagged += exceeded
        rows.append(
            {
                "round": i,
                "nodes_start": rec["nodes_start"],
                "nodes_remaining": rec["nodes_remaining"],
                "cap": cap,
                "exceeded": exceeded,
            }
        )
    return {
        "factor": f,
        "vacuous": vacuous,
        "flagged_rounds": flagged,
        "rows": rows,
        "mode": result.mode,
    }


def pipeline_report(g, cfg, result):
    """Stable-keyed JSON-ready dict describing one pipeline run."""
    x = cfg.resolve_x(g.n)
    report = validate_partition(g, result.partition)
    hist = {}
    for layer in result.partition.finite.values():
        hist[layer] = hist.get(layer, 0) + 1
    return {
        "n": g.n,
        "m": g.m,
        "beta": cfg.beta,
        "x": x,
        "delta": cfg.delta,
        "c": cfg.c,
        "mode": result.mode,
        "rounds": result.ledger.rounds,
        "size": result.partition.size,
        "layers_histogram": [[k, hist[k]] for k in sorted(hist)],
        "max_machine_reads": result.ledger.max_machine_reads,
        "valid": report.valid and result.partition.is_full,
        "per_round": result.ledger.per_round,
    }


def pipeline_report_json(g, cfg, result):
    return json.dumps(pipeline_report(g, cfg, result), indent=2)


def partition_size_cap(x, beta, rounds_by_kind):
    """Sum of per-round layer allowances: threshold+1 per sweep round, one
    per peel round."""
    t = layer_threshold(x, beta)
    total = 0
    for kind in rounds_by_kind:
        total += (t + 1) if kind == "lca" else 1
    return total


__all__ = [
    "FailedToProgress",
    "GuessOutcome",
    "HYBRID",
    "LCA_PIPELINE",
    "PEEL",
    "PipelineConfig",
    "PipelineResult",
    "RoundLedger",
    "guess_arboricity_pipeline",
    "partition_pipeline",
    "partition_size_cap",
    "peel_pipeline",
    "pipeline_report",
    "pipeline_report_json",
    "shrink_factor",
    "shrink_report",
]
