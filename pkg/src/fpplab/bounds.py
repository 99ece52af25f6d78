"""Closed-form probability/counting bounds and empirical envelope fits.

The cheap-path bound: if a fraction lambda of the length law sits below a
threshold delta, a path of n edges has total length <= eps*n with
probability at most base(eps, delta, lambda)^n, where

    base = lambda^(1 - t) / (t^t (1 - t)^(1 - t)),   t = eps / delta,

and base -> lambda as eps -> 0.  Everything is evaluated in log space so
n in the thousands cannot underflow.  The counting bound pairs with it:
paths of n edges passing within n of a root vertex number at most
(q + 1)^(3n) in a graph of maximum degree q.

The envelope fits estimate the two path-length constants observed on a
fixed weight draw: the additive slack of subpath weights over twice the
mean, and a linear lower envelope weight >= slope * hops - slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import Graph, Path
from .weights import WeightAssignment


@dataclass(frozen=True)
class CheapPathBound:
    eps: float
    delta: float
    lam: float
    n: int
    base: float                 # per-edge factor
    log_bound: float            # n * log(base)
    bound: float                # base ** n (0.0 if it underflows)
    two_lambda_bound: float     # statement-level (2*lambda)^n variant


def cheap_path_base(eps: float, delta: float, lam: float) -> float:
    """Per-edge factor of the cheap-path bound; tends to lam as eps -> 0."""
    if not 0 < eps < delta:
        raise ValueError("need 0 < eps < delta")
    if not 0 < lam < 1:
        raise ValueError("need 0 < lam < 1")
    t = eps / delta
    log_base = (1 - t) * math.log(lam) - t * math.log(t) - (1 - t) * math.log1p(-t)
    return math.exp(log_base)


def short_path_bound(eps: float, delta: float, lam: float, n: int) -> CheapPathBound:
    """P(path of n edges has weight <= eps*n) <= base^n, in log space."""
    if n < 1:
        raise ValueError("need n >= 1")
    base = cheap_path_base(eps, delta, lam)
    log_bound = n * math.log(base)
    two_lam = min(1.0, 2.0 * lam)
    return CheapPathBound(
        eps=eps,
        delta=delta,
        lam=lam,
        n=n,
        base=base,
        log_bound=log_bound,
        bound=math.exp(log_bound) if log_bound > -745 else 0.0,
        two_lambda_bound=math.exp(n * math.log(two_lam)) if two_lam < 1 else 1.0,
    )


def path_count_bound(max_degree: int, n: int) -> int:
    """Upper bound (q+1)^(3n) on paths of n edges within n of a vertex."""
    if max_degree < 2 or n < 1:
        raise ValueError("need max_degree >= 2 and n >= 1")
    return (max_degree + 1) ** (3 * n)


def log_path_count_bound(max_degree: int, n: int) -> float:
    if max_degree < 2 or n < 1:
        raise ValueError("need max_degree >= 2 and n >= 1")
    return 3 * n * math.log(max_degree + 1)


def count_paths_near(g: Graph, origin: int, n: int) -> int:
    """Exhaustive count of n-edge walks passing within n hops of origin.

    Independent enumeration oracle for the counting bound; exponential in n,
    keep n small.
    """
    from .graphs import hop_distances

    dist = hop_distances(g, origin)
    total = 0
    for start in range(g.vertex_count):
        stack = [(start, 0, dist[start] <= n)]
        while stack:
            v, length, near = stack.pop()
            if length == n:
                total += int(near)
                continue
            for u in g.neighbors(v):
                stack.append((int(u), length + 1, near or dist[u] <= n))
    return total


# -- envelope fits -------------------------------------------------------------


def lln_slack(g: Graph, w: WeightAssignment, p: Path, mean: float) -> float:
    """Largest excess of a subpath's weight over twice the mean rate:

        max over 0 <= i <= j <= n of  weight(p[i..j]) - 2*mean*(j-i),

    computed in O(n) from prefix sums (i == j pins the value at >= 0).
    The path must be self-avoiding.
    """
    if len(set(p.vertices)) != len(p.vertices):
        raise ValueError("path must be self-avoiding")
    if mean <= 0:
        raise ValueError("mean must be positive")
    wts = np.array([w.weights[g.edge_id(a, b)]
                    for a, b in zip(p.vertices, p.vertices[1:])])
    adjusted = np.concatenate([[0.0], np.cumsum(wts)])
    adjusted -= 2.0 * mean * np.arange(len(adjusted))
    return float(np.max(adjusted - np.minimum.accumulate(adjusted)))


@dataclass(frozen=True)
class EnvelopeFit:
    slope: float                # c: weight >= slope * hops - slack
    slack: float
    grid_step: float
    binding_index: int          # sample that pins the slack at the fit


def fit_linear_envelope(samples, step: float = 0.05) -> EnvelopeFit:
    """Fit the steepest grid slope whose required slack stays within the
    slope-quantization allowance (step * max_hops / 2); report that slope
    with its minimal slack.

    samples: iterable of (hop_length, weight) pairs from observed geodesics.
    """
    pts = [(int(h), float(v)) for h, v in samples]
    if len(pts) < 2 or len({h for h, _ in pts}) < 2:
        raise ValueError("degenerate samples: need >= 2 distinct hop lengths")
    if any(h < 1 for h, _ in pts) or any(v < 0 for _, v in pts):
        raise ValueError("degenerate samples: need hops >= 1 and weights >= 0")
    hops = np.array([h for h, _ in pts], dtype=float)
    vals = np.array([v for _, v in pts], dtype=float)
    max_ratio = float(np.max(vals / hops))
    allowance = step * float(np.max(hops)) / 2.0
    k_max = max(1, math.ceil(max_ratio / step) + 1)
    chosen = None
    for k in range(1, k_max + 1):
        c = k * step
        slack = float(np.max(np.maximum(c * hops - vals, 0.0)))
        if slack <= allowance + 1e-12:
            chosen = (c, slack)
    if chosen is None:
        c = step
        chosen = (c, float(np.max(np.maximum(c * hops - vals, 0.0))))
    c, slack = chosen
    binding = int(np.argmax(c * hops - vals))
    return EnvelopeFit(slope=c, slack=slack, grid_step=step, binding_index=binding)


@dataclass(frozen=True)
class BoundConstants:
    """The observed path-length constants for one weight draw."""

    mean: float
    lln_slack: float
    envelope_slope: float
    envelope_slack: float
    seed: int
    trial: int
