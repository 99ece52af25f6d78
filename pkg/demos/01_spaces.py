"""Tour of the example spaces.

Builds each generator's space, prints its vital statistics, and audits the
structural invariants: the marked geodesic really is a geodesic, boundary
layers sit where they should, and the tessellation's per-layer counts match
the closed-form recursion.
"""

import numpy as np

from fpplab import (
    gen_bubble_lattice,
    gen_hyperbolic_tiling,
    gen_lattice_box,
    gen_regular_tree,
)
from fpplab.generators import BubbleSpec
from fpplab.graphs import hop_distances, is_geodesic


def show(bundle):
    d = bundle.describe()
    print(f"  {d['kind']:<8s} {str(d['params']):<42s} "
          f"V={d['vertices']:<7d} E={d['edges']:<7d} deg<={d['max_degree']} "
          f"axis={d['geodesic_hops']:<3d} safe={d['safe_radius']}")
    assert is_geodesic(bundle.graph, bundle.geodesic)
    assert bundle.geodesic[bundle.origin_index] == bundle.origin


print("=" * 78)
print("The spaces")
print("=" * 78)

print("\nEuclidean boxes (flat):")
for half in (10, 20, 40):
    show(gen_lattice_box(2, half))

print("\nRegular trees (infinitely negatively curved):")
for depth in (6, 8, 10):
    show(gen_regular_tree(3, depth))

print("\nHyperbolic tessellations:")
for p, q, layers in ((3, 7, 4), (3, 7, 6), (4, 5, 4), (7, 3, 5)):
    show(gen_hyperbolic_tiling(p, q, layers))

print("\nLayer growth of {3,7} (exponential, the signature of negative")
print("curvature) against the plane's linear shells:")
h = gen_hyperbolic_tiling(3, 7, 6)
sizes = h.meta["layer_sizes"]
print("  {3,7} layers:  ", sizes)
print("  ratios:        ",
      [round(b / a, 2) for a, b in zip(sizes[1:], sizes[2:])])
z = gen_lattice_box(2, 6)
f = hop_distances(z.graph, z.origin)
print("  plane shells:  ", [int(np.sum(f == r)) for r in range(7)])

print("\nThe bubble-weighted plane: cheap square contours create shortcuts")
print("around the origin, the discrete analogue of positive-curvature")
print("bubbles that a flat plane can host:")
bundle, w = gen_bubble_lattice(40, BubbleSpec(sizes=(4, 16)))
cheap = int(np.sum(w.weights == 0.1))
print(f"  box L=40, contours at 4 and 16: {cheap} cheap edges "
      f"(8*4 + 8*16 = {8 * 4 + 8 * 16}), {len(w.weights) - cheap} unit edges")
