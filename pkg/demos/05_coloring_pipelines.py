"""
Coloring through low out-degree orientations
============================================

A full layered partition orients every edge toward the higher layer, which
caps out-degrees at beta.  On top of that orientation: the polynomial
reduction trades palette m for roughly (beta log m)^2 in one shot, block
folding trims to beta+1 within a layer, and greedy cross-layer recoloring
stitches the layers into a proper coloring of the whole graph.
"""

from arbcolor.ampc import PipelineConfig
from arbcolor.coloring import (
    arb_linial_full,
    color_pipeline_1,
    color_pipeline_2,
    color_pipeline_3,
    color_pipeline_large_alpha,
    is_proper,
    orient_by_partition,
)
from arbcolor.graph import generate_forest_union
from arbcolor.partition import natural_partition

g, cert = generate_forest_union(160, 2, seed=21)
cfg = PipelineConfig(beta=1, x_override=8, alpha_hint=cert.value, epsilon=1.0)

# The orientation alone: acyclic, out-degree bounded by beta.
part = natural_partition(g, 3 * cert.value)
orient = orient_by_partition(g, part)
print("max out-degree:", orient.max_out_degree(), "<= beta =", part.beta)

# The polynomial reduction needs room to work: starting from node ids on a
# big sparse graph it collapses thousands of colors in a couple of steps,
# then stalls at its fixpoint (roughly (2 beta log m)^2).
big, big_cert = generate_forest_union(4096, 1, seed=2)
big_part = natural_partition(big, 3 * big_cert.value)
big_orient = orient_by_partition(big, big_part)
colored, steps = arb_linial_full(big_orient)
print(f"polynomial route on n=4096: palette {colored.palette} after {steps} steps,",
      "proper:", is_proper(big, colored))

# The four pipelines trade palette size against simulated rounds.
for name, run in (
    ("p1 ", lambda: color_pipeline_1(g, cfg)),
    ("p2 ", lambda: color_pipeline_2(g, cfg)),
    ("p3 ", lambda: color_pipeline_3(g, cfg)),
    ("poly", lambda: color_pipeline_large_alpha(g, cfg, "POLY")),
    ("lin ", lambda: color_pipeline_large_alpha(g, cfg, "LINEAR")),
):
    res = run()
    print(f"{name}: palette {res.coloring.palette:4d}  rounds {res.rounds_charged:3d}"
          f"  proper {is_proper(g, res.coloring)}")
