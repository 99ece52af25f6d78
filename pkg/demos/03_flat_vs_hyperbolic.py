"""The coarse-geometry instruments that separate flat from hyperbolic.

Three probes on three spaces (plane box, regular tree, {3,7} tessellation):

  * triangle thinness: how far a geodesic triangle's side can stray from
    the other two sides (bounded = hyperbolic, growing = flat);
  * the middle-third gauge: the smallest neighborhood of the middle third
    that every moderately-long connecting path must cross (stabilizes on a
    hyperbolic axis, grows linearly on a flat one);
  * the detour profile: the hop cost of connecting two off-axis witnesses
    while staying R away from the axis (explodes with R in negative
    curvature, stays flat in the plane, separates entirely on a tree).
"""

import time

from fpplab.coarse import detour_profile, morse_gauge, sample_thinness
from fpplab.generators import gen_hyperbolic_tiling, gen_lattice_box, gen_regular_tree

t0 = time.time()
plane_small = gen_lattice_box(2, 5)
plane_mid = gen_lattice_box(2, 10)
plane_big = gen_lattice_box(2, 40)
tree = gen_regular_tree(3, 10)
tiling = gen_hyperbolic_tiling(3, 7, 6)

print("=" * 78)
print("Triangle thinness (exact where feasible, sampled on the tessellation)")
print("=" * 78)
r_tree = sample_thinness(gen_regular_tree(3, 5).graph, "all")
print(f"  tree depth 5, all {r_tree.triangle_count} triangles:     "
      f"delta = {r_tree.delta_hat}   (tripods: always 0)")
r5 = sample_thinness(plane_small.graph, "all")
r10 = sample_thinness(plane_mid.graph, "all")
print(f"  plane L=5,  all {r5.triangle_count} triangles:   delta = {r5.delta_hat}")
print(f"  plane L=10, all {r10.triangle_count} triangles: delta = {r10.delta_hat}"
      "   (doubles with the box: flat)")
rh = sample_thinness(tiling.graph, 10_000, seed=1)
print(f"  {{3,7}} layers 6, 10^4 sampled:    delta = {rh.delta_hat}"
      f"   histogram {rh.histogram}")

print()
print("=" * 78)
print("Middle-third gauge (length budget 1.5x the separation)")
print("=" * 78)
gt = morse_gauge(tree, 1.5, [4, 8, 12], seed=1)
gz = morse_gauge(plane_big, 1.5, [4, 8, 16], seed=1)
gh = morse_gauge(tiling, 1.5, [3, 4, 5], seed=1)
print(f"  tree:   {gt.smallest_feasible}   (cut vertices: gauge 1 at all scales)")
print(f"  plane:  {gz.smallest_feasible}   (no uniform gauge: grows with n)")
print(f"  {{3,7}}:  {gh.smallest_feasible}   (stabilizes: the axis is Morse-like)")

print()
print("=" * 78)
print("Detour profiles (cheapest avoiding path / separation)")
print("=" * 78)
dt = detour_profile(gen_regular_tree(3, 15), [1, 2, 3], seed=2, side_mode="any")
print("  tree:  ", {p.radius: p.ratio for p in dt.points},
      " (the axis separates: no avoiding path at all)")
dz = detour_profile(plane_big, [2, 4, 8], seed=2)
print("  plane: ", {p.radius: p.ratio for p in dz.points},
      " (parallel lines: avoiding is free)")
dh = detour_profile(tiling, [1, 2, 3], seed=2, gap_multiple=2.0)
print("  {3,7}: ", {p.radius: round(p.ratio, 3) for p in dh.points},
      " (cost explodes with the radius)")

print(f"\n[{time.time() - t0:.1f}s]")
