"""
Layered peeling partitions
==========================

Peel a graph layer by layer: every node with at most beta not-yet-layered
neighbors joins the current layer.  Restricting the peel to a subset S
leaves outsiders at infinity, and layers can only improve as S grows.
"""

from arbcolor.graph import Graph, generate_forest_union
from arbcolor.partition import (
    dependency_set,
    induced_partition,
    min_merge,
    natural_partition,
    validate_partition,
)

# A star: leaves 0..4, center 5.  With beta=2 the leaves peel first.
star = Graph(6, [(i, 5) for i in range(5)])
full = natural_partition(star, beta=2)
print("star layers:", dict(sorted(full.finite.items())))

# The same peel over only {center} never assigns anything: the center
# keeps five unlayered neighbors forever.
partial = induced_partition(star, [5], beta=2)
print("center-only peel leaves it at infinity:", partial.layer(5))

# The dependency set of the center is its witness: all strictly lower
# layers it can reach.
dep = dependency_set(star, full, 5)
print("center's witness set:", sorted(dep.members))

# Merging partial layerings pointwise (infinity on top) stays valid.
g, _ = generate_forest_union(30, 2, seed=3)
a = induced_partition(g, range(0, 30, 2), beta=4)
b = induced_partition(g, range(1, 30, 2), beta=4)
merged = min_merge([a, b])
print("merge of two partial peels valid:", validate_partition(g, merged).valid)
print("finite in merge:", len(merged.finite), "of", g.n)

# The full-graph peel is the floor: no subset peel can go lower.
whole = natural_partition(g, beta=4)
print("merged >= full-graph layers everywhere:",
      all(merged.layer(v) >= whole.layer(v) for v in range(g.n)))
