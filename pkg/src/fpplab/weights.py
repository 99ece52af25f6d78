"""Edge length distributions and reproducible i.i.d. weight sampling.

Every distribution here satisfies the two standing hypotheses of the model:
no atom at zero and a finite positive mean.  Sampling is counter-based: the
weight of edge e in trial t under master seed s is a pure function of
(s, t, e), realized by drawing the per-edge uniforms from a Philox stream
keyed on (s, t) and transforming them through the analytic inverse cdf.
Identical inputs give bit-identical weights regardless of evaluation order
or worker count.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph

# Keeps transformed uniforms in the open interval (0, 1) so that inverse
# cdfs never emit 0 for distributions with no atom at zero.
_HALF_ULP = 2.0 ** -54


@dataclass(frozen=True)
class SeedSpec:
    """(master seed, trial index) -> one weight assignment."""

    master_seed: int
    trial: int = 0

    def philox_key(self) -> np.ndarray:
        return np.array(
            [self.master_seed % 2 ** 64, self.trial % 2 ** 64], dtype=np.uint64
        )


def derived_rng(master_seed: int, label: str, index: int = 0) -> np.random.Generator:
    """Seeded generator for auxiliary sampling (pair/triple/config picks).

    The key mixes the label through a real hash so different instruments
    never share a stream; Python's salted hash() is deliberately avoided.
    """
    h = hashlib.blake2b(f"{label}:{index}".encode(), digest_size=16).digest()
    key = np.frombuffer(h, dtype=np.uint64) ^ np.uint64(master_seed % 2 ** 64)
    return np.random.Generator(np.random.Philox(key=key))


class EdgeDistribution:
    """A validated edge-length law with analytic mean and cdf.

    kind: exponential | uniform | discrete | pareto | constant
    """

    __slots__ = ("kind", "params", "mean", "scale")

    def __init__(self, kind: str, params: dict, mean: float, scale: float = 1.0):
        self.kind = kind
        self.params = dict(params)
        self.mean = mean
        self.scale = scale

    # -- factory / validation --------------------------------------------

    @staticmethod
    def make(kind: str, **params) -> "EdgeDistribution":
        kind = {"shifted-constant": "constant"}.get(kind, kind)
        if kind == "exponential":
            rate = float(params.get("rate", 1.0))
            if rate <= 0:
                raise ValueError("exponential rate must be > 0")
            return EdgeDistribution(kind, {"rate": rate}, 1.0 / rate)
        if kind == "uniform":
            low = float(params["low"])
            high = float(params["high"])
            if not 0 <= low < high:
                raise ValueError("uniform needs 0 <= low < high")
            return EdgeDistribution(kind, {"low": low, "high": high},
                                    0.5 * (low + high))
        if kind == "discrete":
            values = np.asarray(params["values"], dtype=float)
            probs = np.asarray(params["probs"], dtype=float)
            if len(values) != len(probs) or len(values) == 0:
                raise ValueError("discrete needs matching values/probs")
            if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
                raise ValueError("discrete probs must be >= 0 and sum to 1")
            order = np.argsort(values)
            values, probs = values[order], probs[order]
            if np.any((values == 0.0) & (probs > 0)):
                raise ValueError("atom at zero")
            if np.any(values < 0):
                raise ValueError("support must be in [0, infinity)")
            return EdgeDistribution(
                kind,
                {"values": values.tolist(), "probs": probs.tolist()},
                float(np.dot(values, probs)),
            )
        if kind == "pareto":
            shape = float(params["shape"])
            scale = float(params.get("scale", 1.0))
            if scale <= 0:
                raise ValueError("pareto scale must be > 0")
            if shape <= 1:
                raise ValueError("infinite mean")
            return EdgeDistribution(
                kind, {"shape": shape, "scale": scale},
                shape * scale / (shape - 1.0),
            )
        if kind == "constant":
            value = float(params["value"])
            if value == 0:
                raise ValueError("atom at zero")
            if value < 0:
                raise ValueError("support must be in [0, infinity)")
            return EdgeDistribution(kind, {"value": value}, value)
        raise ValueError(f"unknown distribution kind {kind!r}")

    def scaled(self, factor: float) -> "EdgeDistribution":
        """Wrapper whose every draw is exactly factor * the base draw."""
        if factor <= 0:
            raise ValueError("scale factor must be > 0")
        return EdgeDistribution(
            self.kind, self.params, factor * self.mean, self.scale * factor
        )

    # -- analytics ---------------------------------------------------------

    def cdf(self, t: float) -> float:
        """F(t) = mass of [0, t]."""
        if t < 0:
            return 0.0
        t = t / self.scale
        k, p = self.kind, self.params
        if k == "exponential":
            return -math.expm1(-p["rate"] * t)
        if k == "uniform":
            if t <= p["low"]:
                return 0.0
            if t >= p["high"]:
                return 1.0
            return (t - p["low"]) / (p["high"] - p["low"])
        if k == "discrete":
            return float(
                sum(q for v, q in zip(p["values"], p["probs"]) if v <= t)
            )
        if k == "pareto":
            if t <= p["scale"]:
                return 0.0
            return 1.0 - (p["scale"] / t) ** p["shape"]
        if k == "constant":
            return 1.0 if t >= p["value"] else 0.0
        raise AssertionError(k)

    def variance(self) -> float:
        k, p = self.kind, self.params
        if k == "exponential":
            v = 1.0 / p["rate"] ** 2
        elif k == "uniform":
            v = (p["high"] - p["low"]) ** 2 / 12.0
        elif k == "discrete":
            vals = np.asarray(p["values"])
            probs = np.asarray(p["probs"])
            mu = float(np.dot(vals, probs))
            v = float(np.dot((vals - mu) ** 2, probs))
        elif k == "pareto":
            a, s = p["shape"], p["scale"]
            v = math.inf if a <= 2 else s * s * a / ((a - 1) ** 2 * (a - 2))
        elif k == "constant":
            v = 0.0
        else:
            raise AssertionError(k)
        return v * self.scale ** 2

    def from_uniform(self, u: np.ndarray) -> np.ndarray:
        """Inverse cdf applied to uniforms in (0, 1); output strictly > 0."""
        k, p = self.kind, self.params
        if k == "exponential":
            w = -np.log1p(-u) / p["rate"]
        elif k == "uniform":
            w = p["low"] + (p["high"] - p["low"]) * u
        elif k == "discrete":
            cum = np.cumsum(p["probs"])
            idx = np.searchsorted(cum, u, side="right")
            w = np.asarray(p["values"])[np.minimum(idx, len(cum) - 1)]
        elif k == "pareto":
            w = p["scale"] * (1.0 - u) ** (-1.0 / p["shape"])
        elif k == "constant":
            w = np.full_like(u, p["value"])
        else:
            raise AssertionError(k)
        if self.scale != 1.0:
            w = self.scale * w
        return w

    def spec_id(self) -> str:
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        tag = f"{self.kind}({inner})"
        if self.scale != 1.0:
            tag += f"*{self.scale!r}"
        return tag

    def __repr__(self) -> str:  # pragma: no cover
        return f"EdgeDistribution[{self.spec_id()}]"


def validate_distribution(spec: dict) -> EdgeDistribution:
    """Build a distribution from a config mapping {kind: ..., params...}."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind is None:
        raise ValueError("distribution spec needs a 'kind'")
    scale = spec.pop("scale_factor", None)
    dist = EdgeDistribution.make(kind, **spec)
    if scale is not None:
        dist = dist.scaled(float(scale))
    return dist


def cdf_probe(dist: EdgeDistribution, t: float) -> float:
    if t < 0:
        raise ValueError("t must be >= 0")
    return dist.cdf(t)


def weight_threshold(dist: EdgeDistribution, lo: float = 0.1, hi: float = 0.3):
    """Pick (delta, lambda) with lambda = F(delta) in [lo, hi].

    Bisects the cdf toward the midpoint of the band; raises when the law has
    no threshold in the band (e.g. a constant).
    """
    target = 0.5 * (lo + hi)
    a, b = 0.0, max(dist.mean, 1e-9)
    while dist.cdf(b) < target and b < 1e12:
        b *= 2.0
    for _ in range(200):
        mid = 0.5 * (a + b)
        if dist.cdf(mid) < target:
            a = mid
        else:
            b = mid
    delta = b
    lam = dist.cdf(delta)
    if not lo <= lam <= hi:
        raise ValueError(
            f"no weight threshold with cdf in [{lo}, {hi}] for {dist.spec_id()}"
        )
    return delta, lam


@dataclass(frozen=True)
class WeightAssignment:
    """One realization of i.i.d. edge lengths, indexed by canonical edge id."""

    weights: np.ndarray
    distribution_id: str
    master_seed: int
    trial: int
    deterministic: bool = field(default=False)

    def __post_init__(self):
        self.weights.setflags(write=False)

    def __len__(self) -> int:
        return len(self.weights)


def sample_weights(
    g: Graph, dist: EdgeDistribution, seed: SeedSpec
) -> WeightAssignment:
    """Draw one i.i.d. weight per edge; pure function of (graph, dist, seed)."""
    gen = np.random.Generator(np.random.Philox(key=seed.philox_key()))
    u = gen.random(g.edge_count) + _HALF_ULP
    w = dist.from_uniform(u)
    return WeightAssignment(
        weights=w,
        distribution_id=dist.spec_id(),
        master_seed=seed.master_seed,
        trial=seed.trial,
    )


def dump_weights(w: WeightAssignment, path) -> None:
    """Audit dump: one `edge_id weight` line per edge, full precision."""
    lines = [
        f"# distribution {w.distribution_id}",
        f"# master_seed {w.master_seed} trial {w.trial}",
    ]
    lines.extend(f"{i} {float(v)!r}" for i, v in enumerate(w.weights))
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def constant_weights(g: Graph, values: np.ndarray, label: str) -> WeightAssignment:
    """Wrap a deterministic weight vector (e.g. the bubble construction)."""
    values = np.asarray(values, dtype=float)
    if len(values) != g.edge_count:
        raise ValueError("weight vector length != edge count")
    if np.any(values <= 0):
        raise ValueError("weights must be strictly positive")
    return WeightAssignment(
        weights=values,
        distribution_id=label,
        master_seed=0,
        trial=0,
        deterministic=True,
    )
