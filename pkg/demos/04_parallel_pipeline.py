"""
Simulated low-space parallel partitioning
=========================================

One round: every remaining node runs its exploration query, all proof
layerings merge by pointwise minimum, finished nodes leave, and the next
round works on the smaller remainder with fresh (higher) layer numbers.
The ledger records rounds, per-machine reads/writes, and the space budget.
"""

import json

from arbcolor.ampc import (
    PipelineConfig,
    guess_arboricity_pipeline,
    partition_pipeline,
    pipeline_report,
    shrink_report,
)
from arbcolor.graph import generate_forest_union
from arbcolor.partition import validate_partition

g, cert = generate_forest_union(2048, 2, seed=11)
cfg = PipelineConfig(beta=6, x_override=16, alpha_hint=cert.value)
result = partition_pipeline(g, cfg)
print("mode:", result.mode, "| rounds:", result.ledger.rounds,
      "| size:", result.partition.size)
print("valid:", validate_partition(g, result.partition).valid,
      "| full:", result.partition.is_full)
print(json.dumps(pipeline_report(g, cfg, result)["per_round"], indent=2)[:400])

# The survivor count per round against the analytic drop rate.
rep = shrink_report(g, PipelineConfig(beta=10, x_override=64, epsilon=3.0), cert.value)
print("drop factor per round:", round(rep["factor"], 3),
      "| rounds over cap:", rep["flagged_rounds"])

# Without knowing the arboricity, guess double-exponentially, then refine.
outcome = guess_arboricity_pipeline(g, PipelineConfig(beta=1, x_override=8))
print("first successful guess:", outcome.phase1_estimate,
      "| refined estimate:", outcome.alpha_estimate,
      "| rounds charged:", outcome.rounds_charged)
for phase, alpha, ok, rounds in outcome.tried:
    print(f"  {phase}: alpha={alpha} ok={ok} rounds={rounds}")
