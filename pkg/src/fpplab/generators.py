"""Deterministic construction of the example spaces.

Each generator returns a GraphBundle: the graph, an origin, a marked
diameter-spanning hop-geodesic through the origin (the finite stand-in for a
bi-infinite axis), the truncation boundary, and a safe radius inside which
metric quantities are unaffected by the truncation.

The {p,q} tessellation is built by a purely combinatorial layer recursion
(integer bookkeeping of how many faces each rim vertex already carries), so
its structure is exact and auditable; no floating-point geometry anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import connected_components

from .graphs import (
    Graph,
    Path,
    eccentricity,
    hop_distance,
    hop_distances,
    hop_geodesic,
)
from .weights import constant_weights

MAX_EDGES = 2_500_000


class SizeBudgetError(ValueError):
    pass


@dataclass
class GraphBundle:
    """A generated space with its marked data.

    sides: one int8 per vertex, -1/0/+1; the generator's operationalization
    of the two sides of the marked geodesic (0 = on the geodesic, ambiguous,
    or unlabeled).
    """

    graph: Graph
    kind: str
    params: dict
    origin: int
    geodesic: Path
    origin_index: int
    boundary: frozenset
    safe_radius: int
    sides: np.ndarray
    meta: dict = field(default_factory=dict)

    def side_of(self, v: int) -> int:
        return int(self.sides[v])

    def geodesic_vertex(self, offset: int) -> int:
        """Vertex of the marked geodesic at signed offset from the origin."""
        k = self.origin_index + offset
        if not 0 <= k <= self.geodesic.hop_length:
            raise IndexError("offset beyond marked geodesic")
        return self.geodesic[k]

    def describe(self) -> dict:
        side_counts = {
            "minus": int(np.sum(self.sides == -1)),
            "zero": int(np.sum(self.sides == 0)),
            "plus": int(np.sum(self.sides == 1)),
        }
        return {
            "kind": self.kind,
            "params": {k: v for k, v in self.params.items()},
            "vertices": self.graph.vertex_count,
            "edges": self.graph.edge_count,
            "max_degree": self.graph.max_degree,
            "geodesic_hops": self.geodesic.hop_length,
            "origin": self.origin,
            "origin_index": self.origin_index,
            "safe_radius": self.safe_radius,
            "boundary_size": len(self.boundary),
            "sides": side_counts,
        }


def _check_budget(edge_estimate: int) -> None:
    if edge_estimate > MAX_EDGES:
        raise SizeBudgetError(
            f"size budget exceeded: ~{edge_estimate} edges > {MAX_EDGES}"
        )


def _finish_bundle(
    graph, kind, params, origin, geodesic, origin_index, boundary, sides, meta
) -> GraphBundle:
    # One BFS certifies the whole marked path: endpoint distance == length
    # implies every subpath is geodesic.
    field_start = hop_distances(graph, geodesic[0])
    if int(field_start[geodesic[-1]]) != geodesic.hop_length:
        raise AssertionError("marked path is not a geodesic")
    if geodesic[origin_index] != origin:
        raise AssertionError("origin is not at its index on the geodesic")
    if boundary:
        field_o = hop_distances(graph, origin)
        safe_radius = int(min(field_o[v] for v in boundary))
    else:
        safe_radius = eccentricity(graph, origin)
    return GraphBundle(
        graph=graph,
        kind=kind,
        params=params,
        origin=origin,
        geodesic=geodesic,
        origin_index=origin_index,
        boundary=frozenset(boundary),
        safe_radius=safe_radius,
        sides=sides,
        meta=meta,
    )


# -- integer lattice box ---------------------------------------------------


def gen_lattice_box(dim: int, half_width: int) -> GraphBundle:
    """Nearest-neighbor graph on the integer points of [-L, L]^dim."""
    if dim < 1 or half_width < 1:
        raise ValueError("need dim >= 1 and half_width >= 1")
    side = 2 * half_width + 1
    n = side ** dim
    _check_budget(dim * n)

    ids = np.arange(n)
    # coordinate i has stride side**i; coords in [-L, L]
    coords = np.empty((n, dim), dtype=np.int64)
    rem = ids.copy()
    for i in range(dim):
        coords[:, i] = rem % side - half_width
        rem //= side

    edge_chunks = []
    stride = 1
    for i in range(dim):
        ok = coords[:, i] < half_width
        a = ids[ok]
        edge_chunks.append(np.column_stack([a, a + stride]))
        stride *= side
    edges = np.concatenate(edge_chunks)
    g = Graph(n, edges)

    # id of the all-zero point
    origin = int(sum(half_width * side ** i for i in range(dim)))
    axis = [origin + (t - half_width) for t in range(side)]
    geodesic = Path(g, axis)
    sup = np.abs(coords).max(axis=1)
    boundary = frozenset(np.nonzero(sup == half_width)[0].tolist())
    sides = np.zeros(n, dtype=np.int8)
    if dim >= 2:
        sides = np.sign(coords[:, 1]).astype(np.int8)
    return _finish_bundle(
        g,
        "lattice",
        {"dim": dim, "half_width": half_width},
        origin,
        geodesic,
        half_width,
        boundary,
        sides,
        {"coords": coords},
    )


# -- regular tree ------------------------------------------------------------


def gen_regular_tree(degree: int, depth: int) -> GraphBundle:
    """Rooted tree where every internal vertex has total degree `degree`,
    truncated at `depth` levels; the marked geodesic joins two leaves through
    the root (its first two subtrees' leftmost rays)."""
    if degree < 3 or depth < 1:
        raise ValueError("need degree >= 3 and depth >= 1")
    q = degree
    sizes = [1, q]
    for _ in range(depth - 1):
        sizes.append(sizes[-1] * (q - 1))
    n = int(np.sum(sizes))
    _check_budget(n)

    parents = np.empty(n, dtype=np.int64)
    parents[0] = -1
    nxt = 1
    level_start = [0]
    prev_level = [0]
    for lvl in range(depth):
        level_start.append(nxt)
        cur = []
        for v in prev_level:
            k = q if v == 0 else q - 1
            for _ in range(k):
                parents[nxt] = v
                cur.append(nxt)
                nxt += 1
        prev_level = cur
    edges = np.column_stack([parents[1:], np.arange(1, n)])
    g = Graph(n, edges)

    def leftmost_ray(child: int) -> list:
        ray = [child]
        lvl = 1
        while lvl < depth:
            first = int(g.neighbors(ray[-1])[1])  # [0] is the parent (smaller id)
            ray.append(first)
            lvl += 1
        return ray

    ray1 = leftmost_ray(1)
    ray2 = leftmost_ray(2)
    vertices = list(reversed(ray1)) + [0] + ray2
    geodesic = Path(g, vertices)
    boundary = frozenset(range(level_start[depth], n))

    # Side of a vertex = side of the root subtree it hangs in: subtree of
    # child 1 -> -1, of child 2 -> +1, all other subtrees 0 (they attach at
    # the origin itself).  Geodesic vertices stay 0.
    sides = np.zeros(n, dtype=np.int8)
    top = np.zeros(n, dtype=np.int64)
    top[0] = 0
    for v in range(1, n):
        p = parents[v]
        top[v] = v if p == 0 else top[p]
    sides[(top == 1)] = -1
    sides[(top == 2)] = 1
    sides[list(geodesic.vertices)] = 0
    return _finish_bundle(
        g,
        "tree",
        {"degree": degree, "depth": depth},
        0,
        geodesic,
        depth,
        boundary,
        sides,
        {"parents": parents, "level_start": level_start},
    )


# -- hyperbolic {p, q} tessellation ------------------------------------------


class _TilingBuilder:
    """Layer-by-layer construction of the {p,q} tessellation 1-skeleton.

    State per pass: the rim as a cyclic vertex list plus, for every vertex,
    the number of faces already attached.  A pass attaches, walking once
    around the rim, one face over every run of rim edges (absorbing rim
    vertices already carrying q-1 faces) and a fan of vertex faces between
    consecutive edge faces; consecutive new faces share one edge, and the
    freshly created vertices, in creation order, form the next rim.
    """

    def __init__(self, p: int, q: int):
        self.p = p
        self.q = q
        self.nv = 0
        self.edge_set = set()
        self.edges = []
        self.faces = []
        self.faces_at = []
        self.layer_of = []
        self.layers = []

    def _new_vertex(self, layer: int) -> int:
        v = self.nv
        self.nv += 1
        self.faces_at.append(0)
        self.layer_of.append(layer)
        return v

    def _add_edge(self, a: int, b: int) -> None:
        key = (a, b) if a < b else (b, a)
        if key in self.edge_set:
            return
        self.edge_set.add(key)
        self.edges.append(key)

    def _add_face(self, cycle: list) -> None:
        assert len(cycle) == self.p, "face is not a p-gon"
        for v in cycle:
            self.faces_at[v] += 1
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            self._add_edge(a, b)
        self.faces.append(tuple(cycle))

    def seed(self) -> None:
        first = [self._new_vertex(0) for _ in range(self.p)]
        self._add_face(first)
        self.layers.append(first)

    def add_layer(self) -> None:
        p, q = self.p, self.q
        rim = self.layers[-1]
        layer = len(self.layers)
        budget = {v: q - self.faces_at[v] for v in rim}
        fan_count = {v: budget[v] - 2 for v in rim}
        if all(fan_count[v] < 0 for v in rim):
            raise AssertionError("rim fully saturated; not a hyperbolic pair")
        start = next(i for i, v in enumerate(rim) if fan_count[v] >= 0)
        bd = rim[start:] + rim[:start]
        L = len(bd)
        v0 = bd[0]
        created: list = []

        def fresh() -> int:
            v = self._new_vertex(layer)
            created.append(v)
            return v

        hinge_start = fresh()
        self._add_edge(v0, hinge_start)
        hinge = hinge_start

        def fan_faces(w: int, count: int, closing: bool) -> None:
            nonlocal hinge
            for j in range(count):
                last = closing and j == count - 1
                chain = [hinge] + [fresh() for _ in range(p - 3)]
                chain.append(hinge_start if last else fresh())
                self._add_face([w] + chain)
                hinge = chain[-1]

        i = 0
        while i < L:
            u = bd[i]
            k = 1
            while i + k < L and fan_count[bd[i + k]] == -1:
                k += 1
            end_pos = i + k
            wvert = bd[end_pos % L]
            middles = [bd[i + t] for t in range(1, k)]
            wraps = end_pos == L
            closing_run = wraps and fan_count[v0] == 0
            n_fresh = p - k - 2
            assert n_fresh >= 0, "face run too long; not a hyperbolic pair"
            if closing_run:
                assert n_fresh >= 1, "cannot close rim walk on this face"
                chain = [hinge] + [fresh() for _ in range(n_fresh - 1)]
                chain.append(hinge_start)
            else:
                chain = [hinge] + [fresh() for _ in range(n_fresh)]
            # face cycle: u, outer chain, run end, absorbed middles (reversed)
            self._add_face([u] + chain + [wvert] + middles[::-1])
            hinge = chain[-1]
            if wraps:
                if not closing_run:
                    fan_faces(v0, fan_count[v0], closing=True)
                break
            fan_faces(wvert, fan_count[wvert], closing=False)
            i = end_pos

        # creation order is the next rim's cyclic order; verify it.
        for a, b in zip(created, created[1:] + created[:1]):
            key = (a, b) if a < b else (b, a)
            assert key in self.edge_set, "rim cycle broken"
        self.layers.append(created)


def gen_hyperbolic_tiling(p: int, q: int, layers: int) -> GraphBundle:
    """1-skeleton of the regular {p,q} tessellation, `layers` rings deep."""
    if p < 3 or q < 3:
        raise ValueError("need p >= 3 and q >= 3")
    if q * (p - 2) <= 2 * p:
        raise ValueError(f"({p},{q}) is not hyperbolic: need 1/p + 1/q < 1/2")
    if layers < 0:
        raise ValueError("layers must be >= 0")

    b = _TilingBuilder(p, q)
    b.seed()
    for _ in range(layers):
        b.add_layer()
        _check_budget(len(b.edges))
    g = Graph(b.nv, np.asarray(b.edges, dtype=np.int64))

    # structural audits: faces are p-gons around every saturated vertex,
    # disk Euler characteristic, degree cap
    if g.max_degree > q:
        raise AssertionError("vertex degree exceeds q")
    for v in range(g.vertex_count):
        if b.faces_at[v] == q and g.degree(v) != q:
            raise AssertionError("saturated vertex with wrong degree")
    if g.vertex_count - g.edge_count + len(b.faces) != 1:
        raise AssertionError("Euler characteristic of the disk is off")

    origin = 0
    rim = b.layers[-1]
    boundary = frozenset(rim)
    geodesic, origin_index = _axis_through(g, origin, sorted(boundary))
    sides = _sides_from_rim_arcs(g, geodesic, rim) if layers >= 1 else np.zeros(
        g.vertex_count, dtype=np.int8
    )
    layer_of = np.asarray(b.layer_of)
    return _finish_bundle(
        g,
        "tiling",
        {"p": p, "q": q, "layers": layers},
        origin,
        geodesic,
        origin_index,
        boundary,
        sides,
        {
            "faces": b.faces,
            "layer_of": layer_of,
            "layer_sizes": [len(t) for t in b.layers],
        },
    )


def _axis_through(g: Graph, origin: int, extremal_pool) -> tuple:
    """Hop-geodesic through `origin` between two extremal pool vertices.

    Both endpoints stay in the pool (for generated bundles: on the
    truncation boundary); the origin sits as close to the middle as the
    pool allows, at the returned index.
    """
    field_o = hop_distances(g, origin)
    pool = np.asarray(sorted(extremal_pool), dtype=np.int64)
    pool = pool[field_o[pool] >= 1]
    # anchors in decreasing distance from the origin, ties toward smaller id
    order = np.lexsort((pool, -field_o[pool]))
    best = None
    for x in pool[order]:
        x = int(x)
        field_x = hop_distances(g, x)
        through = field_x[pool] == field_x[origin] + field_o[pool]
        cands = pool[through & (pool != x)]
        if len(cands):
            y = int(cands[np.argmax(field_o[cands])])
            best = (x, y)
            break
    if best is None:
        # no geodesic through the origin between pool vertices (degenerate
        # truncation): one-sided axis to the farthest pool vertex
        x = int(pool[order[0]])
        half = hop_geodesic(g, origin, x)
        return half, 0
    x, y = best
    half1 = hop_geodesic(g, x, origin)
    half2 = hop_geodesic(g, origin, y)
    vertices = list(half1.vertices) + list(half2.vertices[1:])
    return Path(g, vertices), half1.hop_length


def _sides_from_rim_arcs(g: Graph, geodesic: Path, rim: list) -> np.ndarray:
    """Side labels from the two rim arcs separated by the axis endpoints.

    Components of the graph minus the axis get -1/+1 by which arc their rim
    vertices fall in (-1 for the arc holding the smaller vertex id); mixed or
    rim-free components stay 0.
    """
    n = g.vertex_count
    sides = np.zeros(n, dtype=np.int8)
    e0, e1 = geodesic[0], geodesic[-1]
    if e0 not in rim or e1 not in rim:
        return sides
    i0, i1 = rim.index(e0), rim.index(e1)
    if i0 > i1:
        i0, i1 = i1, i0
    arc_a = rim[i0 + 1 : i1]
    arc_b = rim[i1 + 1 :] + rim[:i0]
    if not arc_a or not arc_b:
        return sides
    if min(arc_b) < min(arc_a):
        arc_a, arc_b = arc_b, arc_a
    arc_label = {v: -1 for v in arc_a}
    arc_label.update({v: 1 for v in arc_b})

    on_axis = np.zeros(n, dtype=bool)
    on_axis[list(geodesic.vertices)] = True
    keep = ~(on_axis[g.adj_src()] | on_axis[g.indices])
    from scipy.sparse import csr_matrix

    sub = csr_matrix(
        (
            np.ones(int(keep.sum())),
            (g.adj_src()[keep].astype(np.int32), g.indices[keep].astype(np.int32)),
        ),
        shape=(n, n),
    )
    ncomp, comp = connected_components(sub, directed=False)
    for c in range(ncomp):
        members = np.nonzero(comp == c)[0]
        if len(members) == 1 and on_axis[members[0]]:
            continue
        labels = {arc_label[v] for v in members if int(v) in arc_label}
        if len(labels) == 1:
            sides[members] = labels.pop()
    sides[on_axis] = 0
    return sides


# -- deterministic bubble weighting of the plane ------------------------------


@dataclass(frozen=True)
class BubbleSpec:
    """Nested square contours with cheap edges; sizes must grow by >= 4x."""

    sizes: tuple
    cheap: float = 0.1
    default: float = 1.0

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "sizes", sizes)
        if not sizes or sizes[0] < 1:
            raise ValueError("need at least one contour of size >= 1")
        for a, b in zip(sizes, sizes[1:]):
            if b < 4 * a:
                raise ValueError("contour sizes must grow at least 4x")
        if not 0 < self.cheap < self.default:
            raise ValueError("need 0 < cheap < default")


def gen_bubble_lattice(half_width: int, spec: BubbleSpec):
    """Plane box plus the deterministic two-value weighting: edges lying
    along a contour get the cheap length, everything else the default."""
    if spec.sizes[-1] >= half_width:
        raise ValueError("largest contour must fit strictly inside the box")
    bundle = gen_lattice_box(2, half_width)
    coords = bundle.meta["coords"]
    sup = np.abs(coords).max(axis=1)
    e = bundle.graph.edges
    on_contour = np.zeros(bundle.graph.edge_count, dtype=bool)
    for s in spec.sizes:
        on_contour |= (sup[e[:, 0]] == s) & (sup[e[:, 1]] == s)
    values = np.where(on_contour, spec.cheap, spec.default)
    weights = constant_weights(
        bundle.graph, values,
        f"bubble(sizes={list(spec.sizes)},cheap={spec.cheap},default={spec.default})",
    )
    bundle.kind = "bubble"
    bundle.params = {"half_width": half_width, "sizes": list(spec.sizes),
                     "cheap": spec.cheap, "default": spec.default}
    bundle.meta["bubble_spec"] = spec
    bundle.meta["bubble_weights"] = weights
    return bundle, weights


# -- edge-list files -----------------------------------------------------------


def load_edge_list(path) -> GraphBundle:
    """Read `u v` pairs (0-based, `#` comments); optional annotations
    `# origin <id>` and `# geodesic <id> <id> ...`."""
    origin = None
    geo_ids = None
    edges = []
    if hasattr(path, "read"):
        lines = path.read().splitlines()
    else:
        with open(path) as fh:
            lines = fh.read().splitlines()
    for lineno, line in enumerate(lines, 1):
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if body.startswith("origin"):
                origin = int(body.split()[1])
            elif body.startswith("geodesic"):
                geo_ids = [int(t) for t in body.split()[1:]]
            continue
        parts = stripped.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    if not edges:
        raise ValueError("no edges in file")
    n = max(max(e) for e in edges) + 1
    _check_budget(len(edges))
    g = Graph(n, np.asarray(edges, dtype=np.int64))

    if geo_ids is not None:
        geodesic = Path(g, geo_ids)
        if hop_distance(g, geo_ids[0], geo_ids[-1]) != geodesic.hop_length:
            raise ValueError("annotated geodesic is not a geodesic")
    else:
        # double sweep: farthest from 0, then farthest from that
        f0 = hop_distances(g, 0)
        a = int(np.argmax(f0))
        fa = hop_distances(g, a)
        bvert = int(np.argmax(fa))
        geodesic = hop_geodesic(g, a, bvert, field=fa)
    if origin is None:
        origin_index = geodesic.hop_length // 2
        origin = geodesic[origin_index]
    else:
        if origin not in geodesic.vertices:
            raise ValueError("annotated origin not on the geodesic")
        origin_index = geodesic.vertices.index(origin)
    sides = np.zeros(g.vertex_count, dtype=np.int8)
    return _finish_bundle(
        g,
        "file",
        {"path": str(getattr(path, "name", path))},
        origin,
        geodesic,
        origin_index,
        frozenset(),
        sides,
        {},
    )


def dump_edge_list(bundle: GraphBundle, path) -> None:
    lines = ["# fpplab edge list"]
    lines.append(f"# origin {bundle.origin}")
    lines.append("# geodesic " + " ".join(str(v) for v in bundle.geodesic))
    for u, v in bundle.graph.edges:
        lines.append(f"{u} {v}")
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# -- config-driven construction -------------------------------------------------


def make_bundle(spec: dict) -> GraphBundle:
    """Build a bundle from a config mapping {kind: ..., params...}."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind == "lattice":
        return gen_lattice_box(int(spec["dim"]), int(spec["half_width"]))
    if kind == "tree":
        return gen_regular_tree(int(spec["degree"]), int(spec["depth"]))
    if kind == "tiling":
        return gen_hyperbolic_tiling(int(spec["p"]), int(spec["q"]),
                                     int(spec["layers"]))
    if kind == "bubble":
        bspec = BubbleSpec(
            sizes=tuple(spec["sizes"]),
            cheap=float(spec.get("cheap", 0.1)),
            default=float(spec.get("default", 1.0)),
        )
        bundle, _ = gen_bubble_lattice(int(spec["half_width"]), bspec)
        return bundle
    if kind == "file":
        return load_edge_list(spec["path"])
    raise ValueError(f"unknown graph kind {kind!r}")
