"""Coloring pipelines on top of a full layered partition.

Everything starts from the acyclic orientation a partition induces: edges
point from lower to higher layers, with within-layer ties broken by id or
by an initial per-layer color.  Out-degrees are then bounded by the
partition's beta, and three reduction tools apply:

* a one-sided polynomial color reduction: encode colors as low-degree
  polynomials over GF(q) and recolor to (evaluation point, value) pairs,
  shrinking palette m to q^2 with q roughly 2 * beta * log m;
* iterative block halving, which trims a k-coloring to target_beta + 1
  colors by repeatedly folding palette blocks of size 2*(target_beta+1);
* greedy conflict recoloring across layers, processing (layer, initial
  color) groups downward so every node sees at most beta finalized
  neighbors and a free color always exists.

The derandomized trial coloring of ``derand`` slots in as the per-layer
initial coloring when beta is too large for the polynomial route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from . import derand as _derand
from .ampc import partition_pipeline
from .derand import next_prime_above
from .graph import induced_subgraph
from .partition import PartialBetaPartition

LAYER_THEN_ID = "LAYER_THEN_ID"
LAYER_THEN_INITIAL_COLOR = "LAYER_THEN_INITIAL_COLOR"
WHOLE_GRAPH = "WHOLE_GRAPH"
PER_LAYER = "PER_LAYER"
HIGHEST = "HIGHEST"
SMALLEST = "SMALLEST"


class ImproperColoringError(ValueError):
    """An input coloring violates the properness a step relies on."""

    def __init__(self, message, edge=None):
        super().__init__(message)
        self.edge = edge


@dataclass
class Coloring:
    color: dict  # node -> color, 0-based
    palette: int
    scope: str = WHOLE_GRAPH


@dataclass(frozen=True)
class Orientation:
    out: dict  # node -> tuple of out-neighbor ids, ascending
    source_partition: object
    intra_rule: str

    def max_out_degree(self):
        return max((len(v) for v in self.out.values()), default=0)


@dataclass
class ColoringResult:
    coloring: Coloring
    pipeline: str
    rounds_charged: int
    phases: list = field(default_factory=list)
    partition: object = None


def monochromatic_edges(g, coloring):
    col = coloring.color
    return [(u, v) for u, v in g.edges if col[u] == col[v]]


def is_proper(g, coloring):
    col = coloring.color
    return all(col[u] != col[v] for u, v in g.edges)


def orient_by_partition(g, p, rule=LAYER_THEN_ID, initial=None):
    """Edges run from lower to higher layer; within a layer the rule breaks
    the tie (by id, or by initial color then id).  The result is acyclic
    with out-degree at most the partition's beta."""
    if not p.is_full:
        raise ValueError("partition has infinity nodes; orientation undefined")
    if rule not in (LAYER_THEN_ID, LAYER_THEN_INITIAL_COLOR):
        raise ValueError(f"unknown intra-layer rule {rule!r}")
    if rule == LAYER_THEN_INITIAL_COLOR:
        if initial is None:
            raise ValueError("initial coloring required for the color rule")
        for u, v in g.edges:
            if p.finite[u] == p.finite[v] and initial.color[u] == initial.color[v]:
                raise ImproperColoringError(
                    f"edge ({u},{v}) is monochromatic within its layer",
                    edge=(u, v),
                )
    finite = p.finite
    out = {v: [] for v in range(g.n)}
    for u, v in g.edges:
        lu, lv = finite[u], finite[v]
        if lu != lv:
            src, dst = (u, v) if lu < lv else (v, u)
        elif rule == LAYER_THEN_ID:
            src, dst = (u, v) if u < v else (v, u)
        else:
            cu, cv = initial.color[u], initial.color[v]
            src, dst = (u, v) if (cu, u) < (cv, v) else (v, u)
        out[src].append(dst)
    orientation = Orientation(
        out={v: tuple(sorted(lst)) for v, lst in out.items()},
        source_partition=p,
        intra_rule=rule,
    )
    bad = [v for v, lst in orientation.out.items() if len(lst) > p.beta]
    if bad:
        raise ValueError(f"out-degree exceeds beta at nodes {bad[:5]}")
    return orientation


# -- polynomial color reduction ---------------------------------------------


def linial_parameters(m, beta):
    """Smallest prime q with q > 2*beta*d(q), where d(q) is the least digit
    count with q**d >= m.  Distinct colors then map to distinct polynomials
    of degree below d(q), which agree on fewer than d(q) points."""
    if m < 1:
        raise ValueError("palette must be positive")
    q = 2
    while True:
        d = 1
        power = q
        while power < m:
            power *= q
            d += 1
        if q > 2 * beta * d:
            return q, d
        q = next_prime_above(q)


def _digits(c, q, d):
    out = []
    for _ in range(d):
        out.append(c % q)
        c //= q
    return tuple(out)


def arb_linial_step(o, cur):
    """One one-sided reduction: palette m -> q**2.

    Every node picks the smallest evaluation point separating its color
    polynomial from those of all differently-colored out-neighbors; the new
    color packs (point, evaluation).  Only out-neighbors are consulted.  A
    monochromatic oriented edge in the input is reported as an error since
    no evaluation point can separate equal polynomials.
    """
    col = cur.color
    for v, outs in o.out.items():
        for w in outs:
            if col[v] == col[w]:
                raise ImproperColoringError(
                    f"input coloring is monochromatic on oriented edge ({v},{w})",
                    edge=(v, w),
                )
    m = cur.palette
    beta = o.max_out_degree()
    q, d = linial_parameters(m, beta)
    digit_cache = {}
    eval_cache = {}

    def value(c, a):
        key = (c, a)
        got = eval_cache.get(key)
        if got is None:
            digs = digit_cache.get(c)
            if digs is None:
                digs = _digits(c, q, d)
                digit_cache[c] = digs
            acc = 0
            for coef in reversed(digs):
                acc = (acc * a + coef) % q
            eval_cache[key] = acc
            got = acc
        return got

    new = {}
    for v in sorted(o.out):
        cv = col[v]
        others = [col[w] for w in o.out[v] if col[w] != cv]
        for a in range(q):
            pv = value(cv, a)
            if all(value(cw, a) != pv for cw in others):
                new[v] = a * q + pv
                break
        else:  # bad points number at most beta*(d-1) < q
            raise AssertionError("no separating evaluation point found")
    return Coloring(color=new, palette=q * q, scope=cur.scope)


def arb_linial_full(o, initial=None):
    """Iterate the reduction from the id coloring until the palette stops
    shrinking.  Returns ``(coloring, steps)``; steps counts the simulated
    synchronous rounds."""
    nodes = sorted(o.out)
    if initial is None:
        initial = Coloring(
            color={v: v for v in nodes},
            palette=max(1, len(nodes)),
            scope=WHOLE_GRAPH,
        )
    cur = initial
    beta = o.max_out_degree()
    steps = 0
    while True:
        q, _ = linial_parameters(cur.palette, beta)
        if q * q >= cur.palette:
            return cur, steps
        cur = arb_linial_step(o, cur)
        steps += 1


def predicted_linial_palette(n, beta):
    """Pure-arithmetic fixpoint of the reduction recipe from palette n."""
    m = max(1, n)
    while True:
        q, _ = linial_parameters(m, beta)
        if q * q >= m:
            return m
        m = q * q


# -- iterative block halving --------------------------------------------------


def kw_reduce(g_scope, o, cur, target_beta):
    """Fold a k-coloring down to target_beta + 1 colors.

    Each phase splits the palette into consecutive blocks of size
    2*(target_beta+1); within a block the current top color evacuates into
    the block's low half, one sub-round per evacuated color, blocks working
    in parallel.  An evacuating node avoids the current colors of all its
    scope neighbors, of which there are at most target_beta, so a free slot
    always exists; nodes sharing the evacuating color are non-adjacent, and
    parallel blocks land in disjoint ranges, so properness survives every
    sub-round.  Relabeling the drained blocks contiguously halves the
    palette.  Returns ``(coloring, subrounds)``.

    Requires scope degree at most target_beta (true for the layer subgraphs
    of a valid partition, whose within-layer degrees are bounded by beta).
    """
    if any(d > target_beta for d in g_scope.degrees):
        raise ValueError("scope degree exceeds target_beta")
    if any(len(lst) > target_beta for lst in o.out.values()):
        raise ValueError("out-degree in scope exceeds target_beta")
    col = dict(cur.color)
    for u, v in g_scope.edges:
        if col[u] == col[v]:
            raise ImproperColoringError(
                f"input coloring is monochromatic on edge ({u},{v})",
                edge=(u, v),
            )
    b = target_beta + 1
    k = cur.palette
    subrounds = 0
    while k > b:
        width = 2 * b
        nblocks = -(-k // width)
        sizes = [min(width, k - j * width) for j in range(nblocks)]
        for t in range(1, max(s - b for s in sizes) + 1):
            updates = {}
            for v, c in col.items():
                j = c // width
                start = j * width
                s_j = sizes[j]
                if t <= s_j - b and c == start + s_j - t:
                    used = {col[w] for w in g_scope.adjacency[v]}
                    for cand in range(start, start + b):
                        if cand not in used:
                            updates[v] = cand
                            break
                    else:
                        raise AssertionError("free block color must exist")
            col.update(updates)
            subrounds += 1
        relabeled = {}
        for v, c in col.items():
            j, r = divmod(c, width)
            relabeled[v] = j * b + r
        col = relabeled
        k = (nblocks - 1) * b + min(b, sizes[-1])
    return Coloring(color=col, palette=k, scope=cur.scope), subrounds


# -- greedy cross-layer recoloring --------------------------------------------


def recolor_conflicts(g, p, initial, pick=HIGHEST):
    """Resolve cross-layer conflicts into a proper (beta+1)-coloring.

    Nodes are processed by (layer descending, initial color descending, id
    descending); each picks the extremal color of {0..beta} unused by its
    already-finalized neighbors.  Only same-or-higher-layer neighbors can
    be finalized first, so at most beta colors are ever blocked.
    """
    if pick not in (HIGHEST, SMALLEST):
        raise ValueError(f"unknown pick policy {pick!r}")
    if not p.is_full:
        raise ValueError("partition has infinity nodes")
    finite = p.finite
    col0 = initial.color
    for u, v in g.edges:
        if finite[u] == finite[v] and col0[u] == col0[v]:
            raise ImproperColoringError(
                f"initial coloring is monochromatic within a layer on ({u},{v})",
                edge=(u, v),
            )
    beta = p.beta
    order = sorted(range(g.n), key=lambda v: (-finite[v], -col0[v], -v))
    final = {}
    candidates = range(beta, -1, -1) if pick == HIGHEST else range(beta + 1)
    for v in order:
        used = {final[w] for w in g.adjacency[v] if w in final}
        assert len(used) <= beta, "more finalized neighbors than beta"
        for cand in candidates:
            if cand not in used:
                final[v] = cand
                break
    return Coloring(color=final, palette=beta + 1, scope=WHOLE_GRAPH)


# -- derandomized trial coloring ----------------------------------------------


@dataclass
class DerandResult:
    coloring: Coloring
    traces: tuple
    rounds_charged: int


def derand_color(g_scope, x, delta=0.5, seed_policy="EXACT_ENUMERATION"):
    """Proper 2*x*Delta coloring of the scope by repeated derandomized
    trials; see :mod:`arbcolor.derand` for the bit-fixing machinery."""
    if seed_policy != "EXACT_ENUMERATION":
        raise ValueError("only exact seed enumeration is implemented")
    colors, palette, traces = _derand.derand_run(g_scope, x, delta)
    return DerandResult(
        coloring=Coloring(color=colors, palette=palette, scope=WHOLE_GRAPH),
        traces=traces,
        rounds_charged=_derand.rounds_charged(traces, delta),
    )


# -- pipelines -----------------------------------------------------------------


def log_star(n):
    t = 0
    v = float(n)
    while v > 1.0:
        v = math.log2(v)
        t += 1
    return t


def _require_alpha(cfg):
    if cfg.alpha_hint is None:
        raise ValueError("pipeline needs a certified arboricity (alpha_hint)")
    return cfg.alpha_hint


def _partition_for(g, cfg, beta):
    run_cfg = replace(cfg, beta=beta)
    result = partition_pipeline(g, run_cfg)
    if not result.partition.is_full:
        raise ValueError("partition pipeline left infinity nodes")
    return result


def _trivial_result(pipeline):
    return ColoringResult(
        coloring=Coloring(color={}, palette=1, scope=WHOLE_GRAPH),
        pipeline=pipeline,
        rounds_charged=0,
        phases=[{"phase": "empty-graph"}],
    )


def _layer_groups(p):
    groups = {}
    for v, layer in p.finite.items():
        groups.setdefault(layer, []).append(v)
    return {layer: sorted(vs) for layer, vs in sorted(groups.items())}


def color_pipeline_1(g, cfg):
    """Palette about alpha**(2*(1+eps)): partition with beta = ceil(a^(1+eps)),
    then the polynomial reduction, a single step when alpha**eps beats log n."""
    if g.n == 0:
        return _trivial_result("p1")
    alpha = _require_alpha(cfg)
    beta = max(1, math.ceil(alpha ** (1 + cfg.epsilon)))
    part_res = _partition_for(g, cfg, beta)
    orient = orient_by_partition(g, part_res.partition, LAYER_THEN_ID)
    phases = [{
            "phase": "partition",
            "rounds": part_res.ledger.rounds,
            "beta": beta,
            "reads": part_res.ledger.max_machine_reads,
        }]
    ids = Coloring(color={v: v for v in range(g.n)}, palette=max(1, g.n))
    if alpha**cfg.epsilon > math.log2(max(2, g.n)):
        colored = arb_linial_step(orient, ids)
        steps = 1
    else:
        colored, steps = arb_linial_full(orient)
    ball = beta ** max(1, steps)
    phases.append(
        {
            "phase": "linial",
            "steps": steps,
            "palette": colored.palette,
            "ball_fits_space": ball <= g.n**cfg.delta,
        }
    )
    return ColoringResult(
        coloring=colored,
        pipeline="p1",
        rounds_charged=part_res.ledger.rounds + 1,
        phases=phases,
        partition=part_res.partition,
    )


def color_pipeline_2(g, cfg):
    """Palette about beta**2 with beta = ceil((2+eps)*alpha); the reduction
    runs to its fixpoint, charged per round only when alpha is large."""
    if g.n == 0:
        return _trivial_result("p2")
    alpha = _require_alpha(cfg)
    beta = math.ceil((2 + cfg.epsilon) * alpha)
    part_res = _partition_for(g, cfg, beta)
    orient = orient_by_partition(g, part_res.partition, LAYER_THEN_ID)
    colored, steps = arb_linial_full(orient)
    if alpha > 2 ** log_star(g.n):
        color_rounds = max(1, steps)
        ball_ok = None
    else:
        color_rounds = 1
        ball_ok = beta ** max(1, steps) <= g.n**cfg.delta
    phases = [
        {
            "phase": "partition",
            "rounds": part_res.ledger.rounds,
            "beta": beta,
            "reads": part_res.ledger.max_machine_reads,
        },
        {
            "phase": "linial",
            "steps": steps,
            "palette": colored.palette,
            "ball_fits_space": ball_ok,
        },
    ]
    return ColoringResult(
        coloring=colored,
        pipeline="p2",
        rounds_charged=part_res.ledger.rounds + color_rounds,
        phases=phases,
        partition=part_res.partition,
    )


def color_pipeline_3(g, cfg):
    """Palette exactly beta + 1 with beta = ceil((2+eps)*alpha).

    Each layer independently runs the polynomial reduction and the block
    fold down to beta + 1 colors; the cross-layer conflicts are then fixed
    by greedy recoloring with the highest-available rule.
    """
    if g.n == 0:
        return _trivial_result("p3")
    alpha = _require_alpha(cfg)
    beta = math.ceil((2 + cfg.epsilon) * alpha)
    part_res = _partition_for(g, cfg, beta)
    part = part_res.partition
    initial = {}
    max_steps = 0
    max_subrounds = 0
    for layer, nodes in _layer_groups(part).items():
        sub, mapping = induced_subgraph(g, nodes)
        flat = PartialBetaPartition(
            beta=beta, n=sub.n, finite={v: 0 for v in range(sub.n)}
        )
        sub_orient = orient_by_partition(sub, flat, LAYER_THEN_ID)
        colored, steps = arb_linial_full(sub_orient)
        reduced, subrounds = kw_reduce(sub, sub_orient, colored, beta)
        max_steps = max(max_steps, steps)
        max_subrounds = max(max_subrounds, subrounds)
        for v, c in reduced.color.items():
            initial[mapping.to_old(v)] = c
    initial_col = Coloring(color=initial, palette=beta + 1, scope=PER_LAYER)
    final = recolor_conflicts(g, part, initial_col, HIGHEST)
    linial_rounds = max(1, max_steps) if alpha > log_star(g.n) else 1
    batch_layers = max(
        1,
        math.ceil(
            (cfg.c * cfg.delta / beta) * (math.log(max(2, g.n)) / math.log(max(2, beta)))
        ),
    )
    n_layers = part.size
    recolor_rounds = -(-n_layers // batch_layers)
    phases = [
        {
            "phase": "partition",
            "rounds": part_res.ledger.rounds,
            "beta": beta,
            "reads": part_res.ledger.max_machine_reads,
        },
        {"phase": "linial-per-layer", "steps": max_steps, "rounds": linial_rounds},
        {"phase": "kw-per-layer", "subrounds": max_subrounds},
        {
            "phase": "recolor",
            "layer_batches": recolor_rounds,
            "batch_layers": batch_layers,
        },
    ]
    return ColoringResult(
        coloring=final,
        pipeline="p3",
        rounds_charged=part_res.ledger.rounds
        + linial_rounds
        + max_subrounds
        + recolor_rounds,
        phases=phases,
        partition=part,
    )


def color_pipeline_large_alpha(g, cfg, variant="LINEAR"):
    """Per-layer derandomized trial colorings for arboricities too large for
    the polynomial route.

    POLY: beta = ceil(alpha^(1+eps)) and x = ceil(alpha^eps); every layer is
    colored independently with a fresh palette block, so cross-layer edges
    can never conflict.  LINEAR: beta = ceil((2+eps)*alpha), x = 2, shared
    per-layer palettes (cross-layer conflicts allowed), then greedy
    recoloring with the smallest-available rule brings the palette down to
    beta + 1.
    """
    if variant not in ("POLY", "LINEAR"):
        raise ValueError(f"unknown variant {variant!r}")
    if g.n == 0:
        return _trivial_result(f"large-{variant.lower()}")
    alpha = _require_alpha(cfg)
    if variant == "POLY":
        beta = max(1, math.ceil(alpha ** (1 + cfg.epsilon)))
        x = max(2, math.ceil(alpha**cfg.epsilon))
    else:
        beta = math.ceil((2 + cfg.epsilon) * alpha)
        x = 2
    part_res = _partition_for(g, cfg, beta)
    part = part_res.partition
    groups = _layer_groups(part)
    initial = {}
    offset = 0
    max_layer_palette = 1
    derand_rounds = 0
    pre_conflicts = None
    for layer, nodes in groups.items():
        sub, mapping = induced_subgraph(g, nodes)
        colors, palette, traces = _derand.derand_run(sub, x, cfg.delta)
        derand_rounds = max(derand_rounds, _derand.rounds_charged(traces, cfg.delta))
        max_layer_palette = max(max_layer_palette, palette)
        for v, c in colors.items():
            initial[mapping.to_old(v)] = c + (offset if variant == "POLY" else 0)
        if variant == "POLY":
            offset += palette
    if variant == "POLY":
        final = Coloring(color=initial, palette=max(1, offset), scope=WHOLE_GRAPH)
        recolor_rounds = 0
    else:
        initial_col = Coloring(
            color=initial, palette=max_layer_palette, scope=PER_LAYER
        )
        pre_conflicts = len(monochromatic_edges(g, initial_col))
        # the orientation exists per the construction; recoloring consults
        # exactly its out-neighborhoods through the processing order
        orient_by_partition(g, part, LAYER_THEN_INITIAL_COLOR, initial_col)
        final = recolor_conflicts(g, part, initial_col, SMALLEST)
        recolor_rounds = sum(
            len({initial[v] for v in nodes}) for nodes in groups.values()
        )
    phases = [
        {
            "phase": "partition",
            "rounds": part_res.ledger.rounds,
            "beta": beta,
            "reads": part_res.ledger.max_machine_reads,
        },
        {
            "phase": "derand-per-layer",
            "x": x,
            "rounds": derand_rounds,
            "layer_palette": max_layer_palette,
            "pre_recolor_conflicts": pre_conflicts,
        },
    ] + ([] if variant == "POLY" else [{"phase": "recolor", "groups": recolor_rounds}])
    return ColoringResult(
        coloring=final,
        pipeline=f"large-{variant.lower()}",
        rounds_charged=part_res.ledger.rounds + derand_rounds + recolor_rounds,
        phases=phases,
        partition=part,
    )


# -- reporting and text format -------------------------------------------------


def coloring_summary(g, result):
    return {
        "palette": result.coloring.palette,
        "proper": is_proper(g, result.coloring),
        "pipeline": result.pipeline,
        "rounds_charged": result.rounds_charged,
        "phases": result.phases,
    }


def coloring_to_text(coloring, n):
    return "".join(f"{v} {coloring.color[v]}\n" for v in range(n))


def coloring_from_text(text):
    color = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln:
            continue
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad coloring line: {ln!r}")
        color[int(parts[0])] = int(parts[1])
    palette = max(color.values()) + 1 if color else 1
    return Coloring(color=color, palette=palette, scope=WHOLE_GRAPH)
