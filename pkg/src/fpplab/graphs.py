"""Immutable graph core: simple undirected graphs, hop metric, balls and
path neighborhoods.

Vertices are integers 0..n-1.  Edges get canonical ids: the edge list is
sorted by (min(u,v), max(u,v)) and the id of an edge is its position in that
list.  Every module that attaches data to edges (weights, in particular) keys
it by this id, so one graph + one seed always reproduces the same numbers.

Adjacency lists are sorted ascending and all traversals visit neighbors in
that order, which makes every tie-break in the package deterministic.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra


class Graph:
    """Simple (no loops, no multi-edges), connected, undirected graph.

    Immutable after construction; safe to share across workers.
    """

    __slots__ = (
        "vertex_count",
        "edges",
        "edge_count",
        "max_degree",
        "indptr",
        "indices",
        "adj_edge_ids",
        "_adj_src",
        "_unit_csr",
    )

    def __init__(self, vertex_count: int, edge_list) -> None:
        if vertex_count < 1:
            raise ValueError("graph needs at least one vertex")
        raw = np.asarray(edge_list, dtype=np.int64).reshape(-1, 2)
        if raw.size and (raw.min() < 0 or raw.max() >= vertex_count):
            raise ValueError("edge endpoint out of range")
        lo = raw.min(axis=1)
        hi = raw.max(axis=1)
        if np.any(lo == hi):
            raise ValueError("non-simple: self-loop")
        order = np.lexsort((hi, lo))
        lo, hi = lo[order], hi[order]
        if len(lo) > 1:
            dup = (np.diff(lo) == 0) & (np.diff(hi) == 0)
            if np.any(dup):
                k = int(np.nonzero(dup)[0][0])
                raise ValueError(f"non-simple: duplicate edge ({lo[k]}, {hi[k]})")

        m = len(lo)
        self.vertex_count = int(vertex_count)
        self.edge_count = m
        self.edges = np.column_stack([lo, hi])
        self.edges.setflags(write=False)

        # Symmetric CSR adjacency; each directed arc remembers its edge id.
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        order2 = np.lexsort((dst, src))
        self.indices = dst[order2]
        self.adj_edge_ids = eid[order2]
        counts = np.bincount(src, minlength=vertex_count)
        self.indptr = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        self.max_degree = int(counts.max()) if m else 0
        for arr in (self.indices, self.adj_edge_ids, self.indptr):
            arr.setflags(write=False)
        self._adj_src = None
        self._unit_csr = None

        if vertex_count > 1:
            ncomp, _ = connected_components(self.unit_csr(), directed=False)
            if ncomp != 1:
                raise ValueError("disconnected")

    # -- adjacency access ------------------------------------------------

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def edge_id(self, u: int, v: int) -> int:
        """Canonical id of edge (u, v); raises if absent."""
        row = self.indices[self.indptr[u] : self.indptr[u + 1]]
        k = np.searchsorted(row, v)
        if k >= len(row) or row[k] != v:
            raise KeyError(f"no edge ({u}, {v})")
        return int(self.adj_edge_ids[self.indptr[u] + k])

    def has_edge(self, u: int, v: int) -> bool:
        row = self.indices[self.indptr[u] : self.indptr[u + 1]]
        k = np.searchsorted(row, v)
        return k < len(row) and row[k] == v

    def adj_src(self) -> np.ndarray:
        """Row index of each CSR adjacency entry (cached)."""
        if self._adj_src is None:
            self._adj_src = np.repeat(
                np.arange(self.vertex_count), np.diff(self.indptr)
            )
            self._adj_src.setflags(write=False)
        return self._adj_src

    def unit_csr(self) -> csr_matrix:
        """CSR matrix with weight 1.0 on every arc (cached)."""
        if self._unit_csr is None:
            self._unit_csr = csr_matrix(
                (
                    np.ones(len(self.indices)),
                    self.indices.astype(np.int32),
                    self.indptr.astype(np.int32),
                ),
                shape=(self.vertex_count, self.vertex_count),
            )
        return self._unit_csr

    def csr_with_data(self, data: np.ndarray) -> csr_matrix:
        """CSR matrix reusing this graph's structure with given arc data."""
        return csr_matrix(
            (data, self.indices.astype(np.int32), self.indptr.astype(np.int32)),
            shape=(self.vertex_count, self.vertex_count),
        )

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"Graph(n={self.vertex_count}, m={self.edge_count}, "
            f"max_degree={self.max_degree})"
        )


class Path:
    """A walk in a host graph: vertex sequence with consecutive adjacency.

    hop_length is the number of edges.  Subpaths share the definition
    γ([i, j]) -> vertices i..j, hop_length j - i.
    """

    __slots__ = ("vertices",)

    def __init__(self, graph: Graph, vertices) -> None:
        vs = tuple(int(v) for v in vertices)
        if not vs:
            raise ValueError("empty path")
        for a, b in zip(vs, vs[1:]):
            if not graph.has_edge(a, b):
                raise ValueError(f"not a path: ({a}, {b}) is not an edge")
        self.vertices = vs

    @classmethod
    def _unchecked(cls, vertices) -> "Path":
        p = object.__new__(cls)
        p.vertices = tuple(int(v) for v in vertices)
        return p

    @property
    def hop_length(self) -> int:
        return len(self.vertices) - 1

    def subpath(self, i: int, j: int) -> "Path":
        if not 0 <= i <= j <= self.hop_length:
            raise IndexError("subpath out of range")
        return Path._unchecked(self.vertices[i : j + 1])

    def __len__(self) -> int:
        return len(self.vertices)

    def __getitem__(self, k: int) -> int:
        return self.vertices[k]

    def __iter__(self):
        return iter(self.vertices)

    def __eq__(self, other) -> bool:
        return isinstance(other, Path) and self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Path(len={self.hop_length}, {self.vertices[:4]}...)"


# -- hop metric ----------------------------------------------------------


def hop_distances(g: Graph, sources) -> np.ndarray:
    """Hop distance from a vertex (or min over a set of vertices) to all.

    Returns float64 (BFS distances are exact small integers); graphs are
    connected so all entries are finite.
    """
    if np.isscalar(sources):
        return dijkstra(g.unit_csr(), directed=True, indices=int(sources),
                        unweighted=True)
    src = np.asarray(list(sources), dtype=np.int64)
    if src.size == 0:
        return np.full(g.vertex_count, np.inf)
    return dijkstra(g.unit_csr(), directed=True, indices=src,
                    unweighted=True, min_only=True)


def hop_distance(g: Graph, u: int, v: int) -> int:
    """Length of a shortest unweighted u-v path (the graph metric)."""
    d = hop_distances(g, u)[v]
    if not np.isfinite(d):
        raise ValueError("disconnected")
    return int(d)


def hop_geodesic(g: Graph, u: int, v: int, field: np.ndarray | None = None) -> Path:
    """A shortest u-v path with the package-wide deterministic tie-break:
    walking back from v, always step to the smallest-id neighbor that lies
    one hop closer to u.
    """
    if field is None:
        field = hop_distances(g, u)
    if not np.isfinite(field[v]):
        raise ValueError("disconnected")
    out = [v]
    x = v
    while x != u:
        nbrs = g.neighbors(x)
        target = field[x] - 1
        prevs = nbrs[field[nbrs] == target]
        x = int(prevs[0])
        out.append(x)
    out.reverse()
    return Path._unchecked(out)


def ball(g: Graph, center: int, r: int) -> frozenset:
    """Closed hop ball { v : d(center, v) <= r }."""
    if r < 0:
        raise ValueError("radius must be >= 0")
    field = hop_distances(g, center)
    return frozenset(np.nonzero(field <= r)[0].tolist())


def path_neighborhood(g: Graph, p: Path, r: int) -> frozenset:
    """Union of radius-r balls around the vertices of p."""
    if r < 0:
        raise ValueError("radius must be >= 0")
    field = hop_distances(g, set(p.vertices))
    return frozenset(np.nonzero(field <= r)[0].tolist())


def is_geodesic(g: Graph, p: Path) -> bool:
    """True iff p realizes the hop distance between its endpoints.

    (That single check implies every subpath is geodesic too.)
    """
    return hop_distance(g, p[0], p[-1]) == p.hop_length


def eccentricity(g: Graph, v: int) -> int:
    return int(hop_distances(g, v).max())
