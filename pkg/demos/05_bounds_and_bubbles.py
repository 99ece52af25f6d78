"""Quantitative bounds against Monte Carlo, and the bubble shortcut check.

Four short studies:
  * the cheap-path probability bound versus its empirical estimate;
  * the (q+1)^(3n) path-count bound versus exhaustive enumeration;
  * the law-of-large-numbers slack and the linear lower envelope fitted
    from observed geodesics;
  * the bubble-weighted plane, where geodesics between far points provably
    skirt every cheap contour instead of entering it.
"""

import time

from fpplab import EdgeDistribution, SeedSpec, gen_lattice_box, sample_weights
from fpplab.bounds import (
    count_paths_near,
    fit_linear_envelope,
    lln_slack,
    path_count_bound,
    short_path_bound,
)
from fpplab.experiments import (
    bubble_avoidance_check,
    empirical_short_path_probability,
    sample_opposite_pairs,
)
from fpplab.generators import BubbleSpec, gen_bubble_lattice, gen_regular_tree
from fpplab.metric import distance_field
from fpplab.weights import weight_threshold

expo = EdgeDistribution.make("exponential", rate=1.0)
t0 = time.time()

print("=" * 78)
print("Cheap-path bound: P(50-edge path has weight <= 5) for exp(1) lengths")
print("=" * 78)
delta, lam = weight_threshold(expo)
print(f"  threshold policy: delta = {delta:.4f} with cdf mass lambda = {lam:.3f}")
r = empirical_short_path_probability(50, expo, 0.1, 50_000, seed=7)
print(f"  Monte Carlo estimate: {r.estimate}  (5e4 trials)")
print(f"  closed-form bound:    {r.bound:.3e}  per-edge base {r.base:.4f}")
print(f"  bound honored: {r.valid}")
for eps in (0.2, 0.05, 0.01):
    b = short_path_bound(eps, delta, lam, 50)
    print(f"  eps={eps:5.2f}: base {b.base:.4f}  bound {b.bound:.3e}")

print()
print("=" * 78)
print("Path counting: exhaustive versus (q+1)^(3n)")
print("=" * 78)
tree = gen_regular_tree(3, 4)
box = gen_lattice_box(2, 3)
for n in (1, 2, 3):
    ct = count_paths_near(tree.graph, tree.origin, n)
    cb = count_paths_near(box.graph, box.origin, n)
    print(f"  n={n}: tree {ct:6d} <= {path_count_bound(3, n):9d}   "
          f"box {cb:6d} <= {path_count_bound(4, n):9d}")

print()
print("=" * 78)
print("Observed path-length constants on a 2000-edge segment")
print("=" * 78)
seg = gen_lattice_box(1, 1000)
w = sample_weights(seg.graph, expo, SeedSpec(7, 0))
print(f"  subpath-weight slack over twice the mean: "
      f"{lln_slack(seg.graph, w, seg.geodesic, 1.0):.3f}")
plane = gen_lattice_box(2, 20)
samples = []
for t in range(30):
    wt = sample_weights(plane.graph, expo, SeedSpec(7, t))
    f = distance_field(plane.graph, wt, plane.origin)
    for off in (5, 10, 15, 20):
        v = plane.geodesic_vertex(off)
        from fpplab.graphs import hop_distance

        samples.append((hop_distance(plane.graph, plane.origin, v), float(f[v])))
fit = fit_linear_envelope(samples)
print(f"  linear lower envelope from {len(samples)} observed geodesics: "
      f"weight >= {fit.slope:.2f} * hops - {fit.slack:.3f}")

print()
print("=" * 78)
print("Bubble shortcuts: geodesics never enter the cheap contours")
print("=" * 78)
bundle, wts = gen_bubble_lattice(40, BubbleSpec(sizes=(4, 16)))
pairs = sample_opposite_pairs(bundle, 8, seed=7, min_norm=16)
rep = bubble_avoidance_check(bundle, wts, pairs)
agree = sum(row["agree"] for row in rep.rows)
strict = sum(row["none_enter"] for row in rep.rows)
print(f"  {len(rep.rows)} (pair, bubble) checks: "
      f"restricted == unrestricted in {agree}, no co-optimal enters in {strict}")
row = rep.rows[0]
print(f"  sample row: pair ({row['u']}, {row['v']}) bubble {row['bubble']}: "
      f"d = {row['d_omega']:.3f}, interior-forbidden d = {row['d_restricted']:.3f}")
print(f"\n[{time.time() - t0:.1f}s]")
