"""Monte Carlo experiments over the random metric.

The headline measurement: place two vertices n hops apart on the marked
geodesic, symmetric around the origin, and estimate how often the selected
weighted geodesic between them meets a fixed ball around the origin.  On a
flat lattice that probability decays as n grows; along a hyperbolic axis it
stays bounded away from zero.  The rest of the module: stabilization of the
geodesics' trace inside the ball across scales, variance growth of the
random distance, the cheap-path bound versus its Monte Carlo estimate, and
the bubble construction's avoidance certificate.

Reproducibility contract: trial t always uses the weight draw keyed by
(master_seed, t); every sampled choice comes from a labeled stream; results
aggregate in ascending trial order.  Thread count never changes results.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .bounds import BoundConstants, fit_linear_envelope, lln_slack, short_path_bound
from .generators import GraphBundle
from .graphs import Graph, ball
from .metric import (
    co_optimal_meets,
    distance_field,
    restricted_shortest_path,
    weighted_geodesic,
)
from .weights import (
    EdgeDistribution,
    SeedSpec,
    WeightAssignment,
    derived_rng,
    sample_weights,
    weight_threshold,
)


class FeasibilityError(ValueError):
    """Experiment cannot run on this bundle at the requested scales."""


@dataclass
class ExperimentConfig:
    bundle: GraphBundle
    distribution: EdgeDistribution
    master_seed: int
    trials: int
    n_values: tuple            # separations d(x_n, y_n) along the geodesic
    crossing_radius: int = 0   # the crossing set is ball(origin, this)
    margin: int = 0            # extra hops kept clear of the boundary
    name: str = "experiment"
    threads: int = 1
    co_optimal: bool = False   # also test whether ANY co-optimal path crosses

    def __post_init__(self):
        self.n_values = tuple(int(n) for n in self.n_values)
        if self.trials < 1:
            raise FeasibilityError("trial count must be >= 1")
        if not self.n_values or any(n < 1 for n in self.n_values):
            raise FeasibilityError("need separation scales >= 1")
        if self.crossing_radius < 0 or self.margin < 0:
            raise FeasibilityError("crossing radius and margin must be >= 0")
        for n in self.n_values:
            i, j = self._indices(n)
            extent = max(abs(i - self.bundle.origin_index),
                         abs(j - self.bundle.origin_index))
            need = extent + self.crossing_radius + self.margin
            if need > self.bundle.safe_radius:
                raise FeasibilityError(
                    f"scale n={n}: endpoint extent {extent} + crossing radius "
                    f"{self.crossing_radius} + margin {self.margin} = {need} "
                    f"exceeds safe_radius {self.bundle.safe_radius}"
                )

    def _indices(self, n: int):
        geo = self.bundle.geodesic
        if n > geo.hop_length:
            raise FeasibilityError(
                f"scale n={n} exceeds marked geodesic length {geo.hop_length}"
            )
        i = self.bundle.origin_index - math.ceil(n / 2)
        i = min(max(i, 0), geo.hop_length - n)
        return i, i + n

    def scale_pair(self, n: int):
        """Vertices at separation n on the geodesic, centered on the origin."""
        i, j = self._indices(n)
        return self.bundle.geodesic[i], self.bundle.geodesic[j]

    def summary(self) -> dict:
        return {
            "name": self.name,
            "bundle": self.bundle.describe(),
            "distribution": self.distribution.spec_id(),
            "master_seed": self.master_seed,
            "trials": self.trials,
            "n_values": list(self.n_values),
            "crossing_radius": self.crossing_radius,
            "margin": self.margin,
            "co_optimal": self.co_optimal,
        }


def _map_trials(fn, trials: int, threads: int):
    """Run fn(t) for t in 0..trials-1, results in trial order."""
    if threads <= 1:
        return [fn(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, range(trials)))


def _binomial_interval(k: int, n: int, level: float = 0.95):
    """Exact (Clopper-Pearson) binomial confidence interval."""
    if n == 0:
        return 0.0, 1.0
    alpha = 1.0 - level
    lo = 0.0 if k == 0 else float(stats.beta.ppf(alpha / 2, k, n - k + 1))
    hi = 1.0 if k == n else float(stats.beta.ppf(1 - alpha / 2, k + 1, n - k))
    return lo, hi


def _fit_constants(cfg: ExperimentConfig, samples) -> dict:
    """Observed path-length constants for the trial-0 draw, for the summary."""
    w0 = sample_weights(cfg.bundle.graph, cfg.distribution,
                        SeedSpec(cfg.master_seed, 0))
    slack = lln_slack(cfg.bundle.graph, w0, cfg.bundle.geodesic,
                      cfg.distribution.mean)
    slope = env_slack = float("nan")
    usable = [(h, v) for h, v in samples if h >= 1]
    if len({h for h, _ in usable}) >= 2:
        fit = fit_linear_envelope(usable)
        slope, env_slack = fit.slope, fit.slack
    constants = BoundConstants(
        mean=cfg.distribution.mean,
        lln_slack=slack,
        envelope_slope=slope,
        envelope_slack=env_slack,
        seed=cfg.master_seed,
        trial=0,
    )
    return {
        "mean": constants.mean,
        "lln_slack_trial0": constants.lln_slack,
        "envelope_slope": constants.envelope_slope,
        "envelope_slack": constants.envelope_slack,
        "fit_seed": constants.seed,
        "fit_trial": constants.trial,
    }


# -- midpoint crossing ---------------------------------------------------------


@dataclass
class MidpointResult:
    config: dict
    per_n: list                 # aggregate dict per scale
    rows: list                  # one dict per (n, trial)
    constants: dict

    def row_columns(self):
        cols = ["n", "trial", "crossed", "excluded", "d_omega", "hops"]
        if self.config.get("co_optimal"):
            cols.append("crossed_any")
        return cols


def midpoint_probability(cfg: ExperimentConfig) -> MidpointResult:
    """Frequency with which the selected geodesic between the scale pair
    meets ball(origin, crossing_radius); trials touching the truncation
    boundary are flagged and excluded from the estimate."""
    g = cfg.bundle.graph
    target = ball(g, cfg.bundle.origin, cfg.crossing_radius)
    target_mask = np.zeros(g.vertex_count, dtype=bool)
    target_mask[list(target)] = True
    boundary_mask = np.zeros(g.vertex_count, dtype=bool)
    boundary_mask[list(cfg.bundle.boundary)] = True
    pairs = {n: cfg.scale_pair(n) for n in cfg.n_values}

    def run_trial(t: int):
        w = sample_weights(g, cfg.distribution, SeedSpec(cfg.master_seed, t))
        recs = []
        for n in cfg.n_values:
            x, y = pairs[n]
            fld = distance_field(g, w, x)
            path = weighted_geodesic(g, w, x, y, field=fld)
            verts = np.asarray(path.vertices)
            rec = {
                "n": n,
                "trial": t,
                "crossed": int(bool(target_mask[verts].any())),
                "excluded": int(bool(boundary_mask[verts].any())),
                "d_omega": float(fld[y]),
                "hops": path.hop_length,
            }
            if cfg.co_optimal:
                rec["crossed_any"] = int(
                    co_optimal_meets(g, w, x, y, target, field_u=fld)
                )
            recs.append(rec)
        return recs

    rows = [r for recs in _map_trials(run_trial, cfg.trials, cfg.threads)
            for r in recs]
    per_n = []
    env_samples = []
    for n in cfg.n_values:
        mine = [r for r in rows if r["n"] == n]
        valid = [r for r in mine if not r["excluded"]]
        k = sum(r["crossed"] for r in valid)
        lo, hi = _binomial_interval(k, len(valid))
        per_n.append({
            "n": n,
            "trials": len(mine),
            "valid": len(valid),
            "excluded": len(mine) - len(valid),
            "crossings": k,
            "p_hat": k / len(valid) if valid else float("nan"),
            "ci_low": lo,
            "ci_high": hi,
        })
        env_samples.extend((r["hops"], r["d_omega"]) for r in valid[:200])
    return MidpointResult(
        config={**cfg.summary(), "experiment": "midpoint"},
        per_n=per_n,
        rows=rows,
        constants=_fit_constants(cfg, env_samples),
    )


# -- geodesic stabilization ------------------------------------------------------


@dataclass
class StabilizationReport:
    config: dict
    trials: list            # per-trial dicts: cores per n, stabilized flag
    stabilized_count: int
    rows: list

    @property
    def stabilized_fraction(self) -> float:
        return self.stabilized_count / len(self.trials) if self.trials else 0.0


def geodesic_stabilization(cfg: ExperimentConfig) -> StabilizationReport:
    """Trace of the selected geodesics inside the crossing ball, across
    scales, for a few fixed draws: stabilized means the top two scales leave
    an identical non-empty trace (the finite-scale witness of a two-sided
    geodesic through the ball)."""
    if len(cfg.n_values) < 3:
        raise FeasibilityError("stabilization needs >= 3 scales")
    if sorted(cfg.n_values) != list(cfg.n_values):
        raise FeasibilityError("scales must be increasing")
    g = cfg.bundle.graph
    target = ball(g, cfg.bundle.origin, cfg.crossing_radius)
    target_mask = np.zeros(g.vertex_count, dtype=bool)
    target_mask[list(target)] = True
    pairs = {n: cfg.scale_pair(n) for n in cfg.n_values}

    def run_trial(t: int):
        w = sample_weights(g, cfg.distribution, SeedSpec(cfg.master_seed, t))
        cores = {}
        paths = {}
        for n in cfg.n_values:
            x, y = pairs[n]
            path = weighted_geodesic(g, w, x, y)
            verts = np.asarray(path.vertices)
            cores[n] = tuple(sorted(verts[target_mask[verts]].tolist()))
            paths[n] = path.vertices
        top, prev = cfg.n_values[-1], cfg.n_values[-2]
        stabilized = bool(cores[top]) and cores[top] == cores[prev]
        common = set(cores[cfg.n_values[0]])
        for n in cfg.n_values[1:]:
            common &= set(cores[n])
        return {
            "trial": t,
            "cores": cores,
            "paths": paths,
            "stabilized": stabilized,
            "stable_core": tuple(sorted(common)),
        }

    trials = _map_trials(run_trial, cfg.trials, cfg.threads)
    rows = [
        {
            "trial": tr["trial"],
            "n": n,
            "core_size": len(tr["cores"][n]),
            "core": " ".join(str(v) for v in tr["cores"][n]),
            "stabilized": int(tr["stabilized"]),
        }
        for tr in trials
        for n in cfg.n_values
    ]
    return StabilizationReport(
        config={**cfg.summary(), "experiment": "stabilization"},
        trials=trials,
        stabilized_count=sum(tr["stabilized"] for tr in trials),
        rows=rows,
    )


# -- cheap-path probability versus its bound -------------------------------------


@dataclass
class ShortPathComparison:
    config: dict
    estimate: float
    standard_error: float
    bound: float
    base: float
    delta: float
    lam: float
    valid: bool
    rows: list


def empirical_short_path_probability(
    n: int,
    dist: EdgeDistribution,
    eps: float,
    trials: int,
    seed: int,
    threads: int = 1,
) -> ShortPathComparison:
    """Monte Carlo estimate of P(weight of an n-edge path <= eps * n),
    paired with the closed-form bound at the banded threshold policy."""
    if n < 1 or trials < 1:
        raise FeasibilityError("need n >= 1 and trials >= 1")
    if eps <= 0:
        raise FeasibilityError("eps must be > 0")
    path_graph = Graph(n + 1, [(i, i + 1) for i in range(n)])
    cutoff = eps * n

    def run_trial(t: int) -> int:
        w = sample_weights(path_graph, dist, SeedSpec(seed, t))
        return int(w.weights.sum() <= cutoff)

    hits = _map_trials(run_trial, trials, threads)
    k = sum(hits)
    estimate = k / trials
    se = math.sqrt(estimate * (1 - estimate) / trials)
    delta, lam = weight_threshold(dist)
    if eps >= delta:
        raise FeasibilityError(
            f"eps={eps} is not below the threshold delta={delta:.6g}"
        )
    b = short_path_bound(eps, delta, lam, n)
    return ShortPathComparison(
        config={
            "experiment": "short_path",
            "n": n,
            "distribution": dist.spec_id(),
            "eps": eps,
            "trials": trials,
            "master_seed": seed,
        },
        estimate=estimate,
        standard_error=se,
        bound=b.bound,
        base=b.base,
        delta=delta,
        lam=lam,
        valid=estimate <= b.bound + 4 * se,
        rows=[{"n": n, "eps": eps, "trials": trials, "hits": k,
               "estimate": estimate, "bound": b.bound}],
    )


# -- variance profile --------------------------------------------------------------


@dataclass
class VarianceProfile:
    config: dict
    per_n: list
    slope: float | None
    slope_stderr: float | None
    rows: list


def variance_profile(cfg: ExperimentConfig) -> VarianceProfile:
    """Sample variance of the random distance across scales, with a log-log
    slope fit; exploratory (no reference value exists)."""
    if len(cfg.n_values) < 3:
        raise FeasibilityError("variance profile needs >= 3 scales")
    if cfg.trials < 2:
        raise FeasibilityError("variance needs >= 2 trials")
    g = cfg.bundle.graph
    pairs = {n: cfg.scale_pair(n) for n in cfg.n_values}

    def run_trial(t: int):
        w = sample_weights(g, cfg.distribution, SeedSpec(cfg.master_seed, t))
        out = {}
        for n in cfg.n_values:
            x, y = pairs[n]
            out[n] = float(distance_field(g, w, x)[y])
        return out

    draws = _map_trials(run_trial, cfg.trials, cfg.threads)
    rows = [{"n": n, "trial": t, "d_omega": draws[t][n]}
            for t in range(cfg.trials) for n in cfg.n_values]
    per_n = []
    for n in cfg.n_values:
        vals = np.array([draws[t][n] for t in range(cfg.trials)])
        var = float(np.var(vals, ddof=1))
        per_n.append({
            "n": n,
            "trials": cfg.trials,
            "mean": float(vals.mean()),
            "variance": var,
            "variance_se": var * math.sqrt(2.0 / (cfg.trials - 1)),
        })
    slope = stderr = None
    distinct = len({p["n"] for p in per_n}) >= 2
    if distinct and all(p["variance"] > 0 for p in per_n):
        fit = stats.linregress(
            np.log([p["n"] for p in per_n]),
            np.log([p["variance"] for p in per_n]),
        )
        slope, stderr = float(fit.slope), float(fit.stderr)
    return VarianceProfile(
        config={**cfg.summary(), "experiment": "variance"},
        per_n=per_n,
        slope=slope,
        slope_stderr=stderr,
        rows=rows,
    )


# -- bubble avoidance ----------------------------------------------------------------


@dataclass
class BubbleAvoidanceReport:
    config: dict
    rows: list
    all_verified: bool


def sample_opposite_pairs(bundle: GraphBundle, count: int, seed: int,
                          min_norm: int) -> list:
    """Seeded far pairs on opposite sides of the axis, outside every bubble."""
    coords = bundle.meta["coords"]
    sup = np.abs(coords).max(axis=1)
    eligible_minus = np.nonzero((sup > min_norm) & (bundle.sides == -1))[0]
    eligible_plus = np.nonzero((sup > min_norm) & (bundle.sides == 1))[0]
    if not len(eligible_minus) or not len(eligible_plus):
        raise FeasibilityError("no eligible opposite-side vertices outside "
                               "the largest bubble")
    rng = derived_rng(seed, "bubble-pairs")
    us = rng.choice(eligible_minus, size=count, replace=True)
    vs = rng.choice(eligible_plus, size=count, replace=True)
    return [(int(u), int(v)) for u, v in zip(us, vs)]


def bubble_avoidance_check(
    bundle: GraphBundle,
    weights: WeightAssignment,
    pairs,
    contour_indices=None,
) -> BubbleAvoidanceReport:
    """For each pair and each bubble: compare the true distance with the
    distance when the bubble's open interior is forbidden.  Equality says a
    geodesic avoiding the interior exists; `none_enter` additionally says no
    co-optimal geodesic enters it.
    """
    spec = bundle.meta.get("bubble_spec")
    if spec is None:
        raise ValueError("bundle has no bubble weighting")
    coords = bundle.meta["coords"]
    sup = np.abs(coords).max(axis=1)
    sizes = spec.sizes
    if contour_indices is None:
        contour_indices = range(len(sizes))
    g = bundle.graph
    rows = []
    for u, v in pairs:
        if sup[u] <= sizes[-1] or sup[v] <= sizes[-1]:
            raise ValueError(f"pair ({u}, {v}) is not outside every bubble")
        fu = distance_field(g, weights, u)
        fv = distance_field(g, weights, v)
        d = float(fu[v])
        for k in contour_indices:
            interior = np.nonzero(sup < sizes[k])[0]
            path = restricted_shortest_path(g, interior, u, v, mode="weighted",
                                            w=weights)
            d_restricted = (
                float(sum(weights.weights[g.edge_id(a, b)]
                          for a, b in zip(path.vertices, path.vertices[1:])))
                if path is not None else math.inf
            )
            through = float(np.min(fu[interior] + fv[interior]))
            rows.append({
                "u": u,
                "v": v,
                "bubble": k,
                "d_omega": d,
                "d_restricted": d_restricted,
                "agree": int(abs(d_restricted - d) <= 1e-9),
                "none_enter": int(through > d + 1e-9),
            })
    return BubbleAvoidanceReport(
        config={"experiment": "bubble_avoidance",
                "distribution": weights.distribution_id,
                "pairs": [list(p) for p in pairs],
                "bubbles": list(sizes)},
        rows=rows,
        all_verified=all(r["agree"] for r in rows),
    )
