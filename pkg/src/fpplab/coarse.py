"""Quantitative negative-curvature instruments.

Everything here runs in the hop metric (the instruments deliberately ignore
the random weights): quasi-geodesic verification, triangle thinness
sampling, the middle-third gauge that separates flat from hyperbolic axes,
detour-cost profiles for paths forced to avoid a neighborhood of the marked
geodesic, and the excursion decomposition of a path that strays far from it.

All sampling is seeded and recorded in the reports, so every number can be
replayed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import shortest_path

from .generators import GraphBundle
from .graphs import (
    Graph,
    Path,
    hop_distances,
    hop_geodesic,
    path_neighborhood,
)
from .metric import restricted_shortest_path
from .weights import derived_rng

_EXACT_LIMIT = 450          # all-triples mode: vertex cap
_MATRIX_LIMIT = 4000        # sampled mode: precompute all-pairs below this


# -- quasi-geodesic verification ------------------------------------------


@dataclass(frozen=True)
class QuasiGeodesicCheck:
    ok: bool
    violation: tuple | None  # (i, j, hop_distance) for the first failure


def is_quasi_geodesic(g: Graph, p: Path, mult: float, add: float) -> QuasiGeodesicCheck:
    """Check j - i <= mult * d(p[i], p[j]) + add for all index pairs.

    Returns the lexicographically first violating pair, if any.
    """
    if mult < 1 or add < 0:
        raise ValueError("need mult >= 1 and add >= 0")
    verts = list(p.vertices)
    unique = sorted(set(verts))
    fields = {u: hop_distances(g, u) for u in unique}
    n = len(verts)
    for i in range(n - 1):
        fi = fields[verts[i]]
        d = fi[verts[i + 1 :]]
        spans = np.arange(i + 1, n) - i
        bad = np.nonzero(spans > mult * d + add)[0]
        if len(bad):
            j = int(i + 1 + bad[0])
            return QuasiGeodesicCheck(False, (i, j, int(d[bad[0]])))
    return QuasiGeodesicCheck(True, None)


# -- triangle thinness -------------------------------------------------------


@dataclass
class ThinnessReport:
    triangle_count: int
    histogram: dict          # thinness value -> number of triangles
    delta_hat: int
    exact: bool
    seed: int | None = None
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.histogram:
            assert self.delta_hat == max(self.histogram)

    def as_dict(self) -> dict:
        return {
            "triangle_count": self.triangle_count,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "delta_hat": self.delta_hat,
            "exact": self.exact,
            "seed": self.seed,
        }


def _pairs_distance_matrix(g: Graph) -> np.ndarray:
    d = shortest_path(g.unit_csr(), method="D", unweighted=True)
    return d.astype(np.int16)


def _matrix_geodesic(g: Graph, dist: np.ndarray, u: int, v: int) -> list:
    """Deterministic hop geodesic using a precomputed distance row of u."""
    row = dist[u]
    out = [v]
    x = v
    while x != u:
        nbrs = g.neighbors(x)
        x = int(nbrs[row[nbrs] == row[x] - 1][0])
        out.append(x)
    out.reverse()
    return out


def _side_cache(g: Graph, dist: np.ndarray):
    cache: dict = {}

    def side(a: int, b: int) -> np.ndarray:
        key = (a, b) if a < b else (b, a)
        got = cache.get(key)
        if got is None:
            got = np.asarray(_matrix_geodesic(g, dist, key[0], key[1]))
            cache[key] = got
        return got

    return side


def _triangle_thinness(dist: np.ndarray, sa: np.ndarray, sb: np.ndarray,
                       sc: np.ndarray) -> int:
    # max over each side's vertices of the distance to the other two sides
    val = 0
    for s, o1, o2 in ((sa, sb, sc), (sb, sc, sa), (sc, sa, sb)):
        m = np.minimum(
            dist[np.ix_(s, o1)].min(axis=1), dist[np.ix_(s, o2)].min(axis=1)
        ).max()
        val = max(val, int(m))
    return val


def sample_thinness(g: Graph, triples="all", seed: int = 0) -> ThinnessReport:
    """Thinness of hop-geodesic triangles over sampled vertex triples.

    triples="all" enumerates every triple (exact mode, small graphs only);
    an integer draws that many seeded triples.  Geodesic sides use the
    package tie-break, so reports replay exactly.
    """
    n = g.vertex_count
    if triples == "all":
        if n > _EXACT_LIMIT:
            raise ValueError(f"exact mode is capped at {_EXACT_LIMIT} vertices")
        return _exact_thinness(g)
    count = int(triples)
    if count < 1:
        raise ValueError("need at least one triple")
    if n < 3:
        raise ValueError("graph too small for triangles")
    rng = derived_rng(seed, "thinness")
    if n <= _MATRIX_LIMIT:
        dist = _pairs_distance_matrix(g)
    else:
        dist = None
    side_of = _side_cache(g, dist) if dist is not None else None

    values = np.empty(count, dtype=np.int32)
    for t in range(count):
        tri = rng.choice(n, size=3, replace=False)
        a, b, c = (int(x) for x in np.sort(tri))
        if dist is not None:
            sa, sb, sc = side_of(a, b), side_of(b, c), side_of(c, a)
            values[t] = _triangle_thinness(dist, sa, sb, sc)
        else:
            fields = {v: hop_distances(g, v) for v in (a, b, c)}
            sa = np.asarray(hop_geodesic(g, a, b, field=fields[a]).vertices)
            sb = np.asarray(hop_geodesic(g, b, c, field=fields[b]).vertices)
            sc = np.asarray(hop_geodesic(g, a, c, field=fields[a]).vertices)
            local = np.stack([hop_distances(g, list(map(int, s)))
                              for s in (sa, sb, sc)])
            val = 0
            for k, s in enumerate((sa, sb, sc)):
                others = np.minimum(local[(k + 1) % 3][s], local[(k + 2) % 3][s])
                val = max(val, int(others.max()))
            values[t] = val
    hist = np.bincount(values)
    histogram = {int(v): int(c) for v, c in enumerate(hist) if c}
    return ThinnessReport(
        triangle_count=count,
        histogram=histogram,
        delta_hat=int(values.max()),
        exact=False,
        seed=seed,
        values=values,
    )


def _exact_thinness(g: Graph) -> ThinnessReport:
    n = g.vertex_count
    dist = _pairs_distance_matrix(g)
    if int(dist.max()) > 120:
        raise ValueError("graph diameter too large for exact mode")
    side_of = _side_cache(g, dist)

    # pass 1: MV[u, v, w] = distance from w to the side between u and v
    MV = np.zeros((n, n, n), dtype=np.int8)
    for a in range(n):
        for b in range(a + 1, n):
            vec = dist[:, side_of(a, b)].min(axis=1).astype(np.int8)
            MV[a, b] = vec
            MV[b, a] = vec

    # pass 2: T[a, b, c] = max over side(a,b) vertices w of
    # min(d(w, side(a,c)), d(w, side(b,c))), vectorized over c
    T = np.zeros((n, n, n), dtype=np.int8)
    for a in range(n):
        for b in range(a + 1, n):
            s = side_of(a, b)
            contrib = np.minimum(MV[a][:, s], MV[b][:, s]).max(axis=1)
            contrib[a] = contrib[b] = 0
            T[a, b, :] = contrib
            T[b, a, :] = contrib
    del MV

    # pass 3: per-triangle thinness = max of the three side contributions
    total = n * (n - 1) * (n - 2) // 6
    counts = np.zeros(128, dtype=np.int64)
    for a in range(n):
        for b in range(a + 1, n):
            cs = np.arange(b + 1, n)
            if not len(cs):
                continue
            v = np.maximum(np.maximum(T[a, b, cs], T[b, cs, a]), T[a, cs, b])
            counts += np.bincount(v.astype(np.int64), minlength=128)
    histogram = {int(v): int(c) for v, c in enumerate(counts) if c}
    return ThinnessReport(
        triangle_count=total,
        histogram=histogram,
        delta_hat=max(histogram) if histogram else 0,
        exact=True,
    )


# -- middle-third gauge ------------------------------------------------------


@dataclass
class MorseGaugeReport:
    mult: float                    # length-bound multiplier on the scale
    n_values: tuple
    smallest_feasible: dict        # n -> smallest working radius (or None)
    gauge: int | None              # max over tested scales, None if any failed
    feasible: bool
    pairs: dict                    # n -> tuple of tested start offsets
    seed: int
    radius_caps: dict

    def as_dict(self) -> dict:
        return {
            "mult": self.mult,
            "n_values": list(self.n_values),
            "smallest_feasible": {str(n): v for n, v in
                                  sorted(self.smallest_feasible.items())},
            "gauge": self.gauge,
            "feasible": self.feasible,
            "pairs": {str(n): list(v) for n, v in sorted(self.pairs.items())},
            "radius_caps": {str(n): v for n, v in sorted(self.radius_caps.items())},
            "seed": self.seed,
        }


def _middle_third(geo: Path, i: int, j: int) -> Path:
    span = j - i
    lo = i + math.ceil(span / 3)
    hi = i + math.floor(2 * span / 3)
    return geo.subpath(lo, hi)


def morse_gauge(
    bundle: GraphBundle,
    mult: float,
    n_values,
    seed: int = 0,
    max_pairs: int = 8,
) -> MorseGaugeReport:
    """Smallest neighborhood radius D (per separation scale n) such that
    every path of length <= mult * n between marked-geodesic vertices at
    distance n crosses the D-neighborhood of the middle third between them.

    A flat axis needs D growing with n; a hyperbolic one stabilizes.
    """
    if mult < 1:
        raise ValueError("mult must be >= 1")
    g = bundle.graph
    geo = bundle.geodesic
    smallest: dict = {}
    pairs_used: dict = {}
    caps: dict = {}
    for n in n_values:
        n = int(n)
        if n < 3:
            raise ValueError("scale must be >= 3 (middle third needs room)")
        off_caps = {}
        for i in range(geo.hop_length - n + 1):
            extent = max(abs(i - bundle.origin_index),
                         abs(i + n - bundle.origin_index))
            cap = bundle.safe_radius - extent - 1
            if cap >= 1:
                off_caps[i] = cap
        if not off_caps:
            raise ValueError(f"scale n={n} too large for this bundle")
        # keep the offsets with the best truncation headroom so the search
        # range is not crushed by pairs near the axis ends
        best_cap = max(off_caps.values())
        offsets = sorted(i for i, c in off_caps.items() if c >= best_cap - 1)
        rng = derived_rng(seed, f"gauge:{n}")
        if len(offsets) > max_pairs:
            picks = rng.choice(len(offsets), size=max_pairs, replace=False)
            offsets = sorted(offsets[k] for k in picks)
        cap = min(off_caps[i] for i in offsets)
        caps[n] = cap
        pairs_used[n] = tuple(offsets)

        def crosses_always(radius: int) -> bool:
            for i in offsets:
                x, y = geo[i], geo[i + n]
                forb = path_neighborhood(g, _middle_third(geo, i, i + n), radius)
                if x in forb or y in forb:
                    continue
                avoid = restricted_shortest_path(g, forb, x, y, mode="hop")
                if avoid is not None and avoid.hop_length <= mult * n:
                    return False
            return True

        if not crosses_always(cap):
            smallest[n] = None
            continue
        lo, hi = 1, cap
        while lo < hi:
            mid = (lo + hi) // 2
            if crosses_always(mid):
                hi = mid
            else:
                lo = mid + 1
        smallest[n] = lo
    found = [v for v in smallest.values() if v is not None]
    feasible = len(found) == len(smallest)
    return MorseGaugeReport(
        mult=mult,
        n_values=tuple(int(n) for n in n_values),
        smallest_feasible=smallest,
        gauge=max(found) if feasible and found else None,
        feasible=feasible,
        pairs=pairs_used,
        seed=seed,
        radius_caps=caps,
    )


# -- detour profile -----------------------------------------------------------


@dataclass
class DetourPoint:
    radius: int
    ratio: float                  # min over configs; inf if nothing avoids
    configs_tested: int
    witness: dict | None          # realizing configuration, when finite
    path: tuple | None            # realizing avoiding path (re-verifiable)


@dataclass
class DetourProfile:
    points: list
    seed: int
    gap_multiple: float
    same_side: bool

    def ratio(self, radius: int) -> float:
        for pt in self.points:
            if pt.radius == radius:
                return pt.ratio
        raise KeyError(radius)

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "gap_multiple": self.gap_multiple,
            "same_side": self.same_side,
            "points": [
                {
                    "radius": p.radius,
                    "ratio": "inf" if p.ratio == math.inf else p.ratio,
                    "configs_tested": p.configs_tested,
                    "witness": p.witness,
                    "path": list(p.path) if p.path is not None else None,
                }
                for p in self.points
            ],
        }


def detour_profile(
    bundle: GraphBundle,
    radii,
    seed: int = 0,
    gap_multiple: float = 10.0,
    max_configs: int = 6,
    side_mode: str = "same",
) -> DetourProfile:
    """Cheapest hop ratio |detour| / d(x, y) over admissible configurations:
    x, y on the marked geodesic, witnesses at hop distance exactly R off it,
    witness separation >= gap_multiple * R, detours forbidden to come within
    R - 1 of the geodesic.  Ratio inf means the neighborhood separates.

    side_mode "same" requires both witnesses on one side of the geodesic
    (the structured flat-space probe); "any" admits every witness pair
    (needed e.g. on trees, whose two rays carry opposite side labels).
    """
    if side_mode not in ("same", "any"):
        raise ValueError("side_mode must be 'same' or 'any'")
    g = bundle.graph
    geo = bundle.geodesic
    axis = list(geo.vertices)
    dist_axis = hop_distances(g, set(axis))
    points = []
    for radius in radii:
        radius = int(radius)
        if radius < 1:
            raise ValueError("radius must be >= 1")
        forbidden = frozenset(np.nonzero(dist_axis <= radius - 1)[0].tolist())
        rng = derived_rng(seed, f"detour:{radius}")
        min_gap = math.ceil(gap_multiple * radius)
        idx_pairs = [
            (i, j)
            for i in range(len(axis))
            for j in range(i + 1, len(axis))
            if (j - i) + 2 * radius >= min_gap
        ]
        # widest separations first, then seeded shuffle within each width
        rng.shuffle(idx_pairs)
        idx_pairs.sort(key=lambda t: -(t[1] - t[0]))

        best: tuple | None = None
        tested = 0
        saw_admissible = False
        for i, j in idx_pairs:
            if tested >= max_configs:
                break
            x, y = axis[i], axis[j]
            fx = hop_distances(g, x)
            wx = np.nonzero((fx == radius) & (dist_axis >= radius))[0]
            if side_mode == "same":
                wx = wx[bundle.sides[wx] != 0]
            if not len(wx):
                continue
            fy = hop_distances(g, y)
            wy = np.nonzero((fy == radius) & (dist_axis >= radius))[0]
            if side_mode == "same":
                wy = wy[bundle.sides[wy] != 0]
            if not len(wy):
                continue
            found = None
            for xp in wx[:12]:
                fxp = hop_distances(g, int(xp))
                ok = wy[fxp[wy] >= min_gap]
                if side_mode == "same":
                    ok = ok[bundle.sides[ok] == bundle.sides[int(xp)]]
                if len(ok):
                    found = (int(xp), int(ok[0]))
                    break
            if found is None:
                continue
            saw_admissible = True
            tested += 1
            xp, yp = found
            avoid = restricted_shortest_path(g, forbidden, xp, yp, mode="hop")
            if avoid is None:
                continue
            ratio = avoid.hop_length / (j - i)
            if best is None or ratio < best[0]:
                best = (ratio, {"i": i, "j": j, "x": x, "y": y,
                                "witness_x": xp, "witness_y": yp,
                                "separation": j - i}, avoid.vertices)
        if not saw_admissible:
            raise ValueError(f"no admissible configuration at radius {radius}")
        if best is None:
            points.append(DetourPoint(radius, math.inf, tested, None, None))
        else:
            points.append(DetourPoint(radius, best[0], tested, best[1], best[2]))
    return DetourProfile(points=points, seed=seed, gap_multiple=gap_multiple,
                         same_side=side_mode == "same")


# -- excursion decomposition ---------------------------------------------------


@dataclass(frozen=True)
class ExcursionRecord:
    radius: int
    trigger_index: int
    start_index: int
    end_index: int
    start_vertex: int
    end_vertex: int
    anchor_start: int        # marked-geodesic index nearest the start vertex
    anchor_end: int
    gap: int                 # hop distance between start and end vertices


def _nearest_axis_index(g: Graph, axis: list, v: int) -> int:
    f = hop_distances(g, v)
    d = f[axis]
    return int(np.argmin(d))  # ties toward the smaller index


def excursion_decomposition(
    bundle: GraphBundle,
    p: Path,
    radius: int,
    trigger_multiple: int = 100,
) -> ExcursionRecord | None:
    """Bracket the first far excursion of p away from the marked geodesic.

    Finds the first index where the distance to the far half of the geodesic
    (origin onward) equals trigger_multiple * radius, then the enclosing
    indices whose distance to the whole geodesic is exactly radius with
    everything in between at distance >= radius.  None when p never leaves
    the radius-neighborhood or never triggers.
    """
    if radius < 1:
        raise ValueError("radius must be >= 1")
    if trigger_multiple < 1:
        raise ValueError("trigger multiple must be >= 1")
    g = bundle.graph
    axis = list(bundle.geodesic.vertices)
    oi = bundle.origin_index
    if not (_nearest_axis_index(g, axis, p[0]) < oi
            < _nearest_axis_index(g, axis, p[-1])):
        raise ValueError("path endpoints must lie on opposite halves of the "
                         "marked geodesic")
    verts = np.asarray(p.vertices)
    dist_axis = hop_distances(g, set(axis))[verts]
    if int(dist_axis.max()) < radius:
        return None
    dist_far = hop_distances(g, set(axis[oi:]))[verts]
    hits = np.nonzero(dist_far == trigger_multiple * radius)[0]
    if not len(hits):
        return None
    r = int(hits[0])
    if dist_axis[r] < radius:
        return None
    at_radius = dist_axis == radius
    before = np.nonzero(at_radius[: r + 1])[0]
    after = np.nonzero(at_radius[r:])[0]
    if not len(before) or not len(after):
        return None
    start = int(before[-1])
    end = int(r + after[0])
    assert np.all(dist_axis[start : end + 1] >= radius)
    sv, ev = int(verts[start]), int(verts[end])
    return ExcursionRecord(
        radius=radius,
        trigger_index=r,
        start_index=start,
        end_index=end,
        start_vertex=sv,
        end_vertex=ev,
        anchor_start=_nearest_axis_index(g, axis, sv),
        anchor_end=_nearest_axis_index(g, axis, ev),
        gap=int(hop_distances(g, sv)[ev]),
    )
