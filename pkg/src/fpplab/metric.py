"""The random metric: exact weighted shortest paths and geodesic extraction.

Distances come from a label-setting (Dijkstra) search on the shared CSR
structure; correctness relies on strictly positive weights.  Geodesic
extraction walks back from the target through exact predecessor equalities
(dist[w] + weight(w, x) == dist[x] holds in floating point for the arc that
settled x), breaking ties toward the smallest vertex id under the sorted
adjacency.  That rule is the package's one deterministic "measurable pick"
of a geodesic, shared by all experiments.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .graphs import Graph, Path
from .weights import WeightAssignment


def _arc_data(g: Graph, w: WeightAssignment) -> np.ndarray:
    return w.weights[g.adj_edge_ids]


def weighted_csr(g: Graph, w: WeightAssignment) -> csr_matrix:
    return g.csr_with_data(_arc_data(g, w))


def distance_field(g: Graph, w: WeightAssignment, source: int) -> np.ndarray:
    """d_w(source, v) for every v, exact to Dijkstra's float arithmetic."""
    return dijkstra(weighted_csr(g, w), directed=True, indices=int(source))


def weighted_distance(g: Graph, w: WeightAssignment, u: int, v: int) -> float:
    if u == v:
        return 0.0
    d = distance_field(g, w, u)[v]
    if not np.isfinite(d):
        raise ValueError("disconnected")
    return float(d)


def _walk_back(
    g: Graph,
    arc_data: np.ndarray,
    field: np.ndarray,
    u: int,
    v: int,
) -> Path:
    """Deterministic geodesic from the distance field of source u."""
    out = [v]
    x = v
    while x != u:
        lo, hi = g.indptr[x], g.indptr[x + 1]
        nbrs = g.indices[lo:hi]
        wts = arc_data[lo:hi]
        exact = field[nbrs] + wts == field[x]
        cand = nbrs[exact]
        if len(cand) == 0:  # pragma: no cover - positive weights preclude it
            raise RuntimeError("predecessor walk failed")
        x = int(cand[0])
        out.append(x)
    out.reverse()
    return Path._unchecked(out)


def weighted_geodesic(
    g: Graph,
    w: WeightAssignment,
    u: int,
    v: int,
    field: np.ndarray | None = None,
) -> Path:
    """The selected minimum-weight u-v path (lexicographic tie-break)."""
    if field is None:
        field = distance_field(g, w, u)
    if not np.isfinite(field[v]):
        raise ValueError("disconnected")
    return _walk_back(g, _arc_data(g, w), field, u, v)


def path_weight(g: Graph, w: WeightAssignment, p: Path) -> float:
    """Sum of edge weights along p, in path order."""
    total = 0.0
    for a, b in zip(p.vertices, p.vertices[1:]):
        total += w.weights[g.edge_id(a, b)]
    return total


def restricted_shortest_path(
    g: Graph,
    forbidden,
    u: int,
    v: int,
    mode: str = "hop",
    w: WeightAssignment | None = None,
):
    """Shortest u-v path whose interior avoids `forbidden`; None if cut off.

    mode is "hop" or "weighted" (the latter needs a weight assignment).
    Endpoints may sit at the rim of the forbidden region but not inside it.
    """
    if mode not in ("hop", "weighted"):
        raise ValueError("mode must be 'hop' or 'weighted'")
    if mode == "weighted" and w is None:
        raise ValueError("weighted mode needs a weight assignment")
    forbidden = np.asarray(sorted(forbidden), dtype=np.int64)
    mask = np.zeros(g.vertex_count, dtype=bool)
    mask[forbidden] = True
    if mask[u] or mask[v]:
        raise ValueError("endpoint inside forbidden set")

    if mode == "hop":
        arc_data = np.ones(len(g.indices))
    else:
        arc_data = _arc_data(g, w)
    keep = ~(mask[g.adj_src()] | mask[g.indices])
    sub = csr_matrix(
        (
            arc_data[keep],
            (g.adj_src()[keep].astype(np.int32), g.indices[keep].astype(np.int32)),
        ),
        shape=(g.vertex_count, g.vertex_count),
    )
    field = dijkstra(sub, directed=True, indices=int(u),
                     unweighted=(mode == "hop"))
    if not np.isfinite(field[v]):
        return None
    # Forbidden vertices carry inf distance, so the exact-predecessor walk
    # can run on the full adjacency and never steps into them.
    blocked_data = arc_data if mode == "weighted" else np.ones(len(g.indices))
    return _walk_back(g, blocked_data, field, u, v)


def co_optimal_meets(
    g: Graph,
    w: WeightAssignment,
    u: int,
    v: int,
    targets,
    field_u: np.ndarray | None = None,
    tol: float = 1e-9,
) -> bool:
    """Whether ANY minimum-weight u-v path meets `targets`.

    A vertex t lies on some optimal path iff d(u,t) + d(t,v) == d(u,v); the
    two sides sum edge weights in different orders, so equality is tested to
    `tol` (ulp-level noise versus the macroscopic cost of a true detour).
    This is the optimistic tie variant needed for atomic length laws.
    """
    if field_u is None:
        field_u = distance_field(g, w, u)
    field_v = distance_field(g, w, v)
    ts = np.asarray(sorted(targets), dtype=np.int64)
    if ts.size == 0:
        return False
    return bool(np.any(field_u[ts] + field_v[ts] <= field_u[v] + tol))
