"""fpplab: a simulation laboratory for first-passage percolation on flat and
negatively curved graphs.

The package builds example spaces (lattice boxes, regular trees, hyperbolic
tessellations, the bubble-weighted plane), equips them with reproducible
i.i.d. random edge lengths, computes exact weighted geodesics, measures
coarse-geometry quantities (triangle thinness, quasi-geodesic constants, the
middle-third gauge, detour profiles, excursions), and runs the headline
Monte Carlo experiments (midpoint crossing, geodesic stabilization, variance
growth, bound validation).
"""

from .graphs import (
    Graph,
    Path,
    ball,
    hop_distance,
    hop_distances,
    hop_geodesic,
    path_neighborhood,
)
from .generators import (
    BubbleSpec,
    GraphBundle,
    gen_bubble_lattice,
    gen_hyperbolic_tiling,
    gen_lattice_box,
    gen_regular_tree,
    load_edge_list,
    dump_edge_list,
    make_bundle,
)
from .weights import (
    EdgeDistribution,
    SeedSpec,
    WeightAssignment,
    cdf_probe,
    sample_weights,
    validate_distribution,
    weight_threshold,
)
from .metric import (
    path_weight,
    restricted_shortest_path,
    weighted_distance,
    weighted_geodesic,
)

__version__ = "0.1.0"
