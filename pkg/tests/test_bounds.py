import math

import numpy as np
import pytest

from fpplab.bounds import (
    cheap_path_base,
    count_paths_near,
    fit_linear_envelope,
    lln_slack,
    log_path_count_bound,
    path_count_bound,
    short_path_bound,
)
from fpplab.generators import gen_lattice_box, gen_regular_tree
from fpplab.weights import EdgeDistribution, SeedSpec, constant_weights, sample_weights


def test_base_limit_is_lambda():
    for lam in (0.05, 0.2, 0.29):
        base = cheap_path_base(1e-12 * 0.3, 0.3, lam)
        assert abs(base - lam) <= 1e-9


def test_base_at_half_threshold():
    lam = 0.2
    base = cheap_path_base(0.15, 0.3, lam)
    assert abs(base - 2 * math.sqrt(lam)) < 1e-12


def test_log_space_matches_direct_small_n():
    b = short_path_bound(0.1, 0.3, 0.2, 3)
    direct = b.base ** 3
    assert abs(b.bound - direct) / direct < 1e-12


def test_doubling_squares_bound():
    a = short_path_bound(0.1, 0.3, 0.2, 25)
    b = short_path_bound(0.1, 0.3, 0.2, 50)
    assert abs(b.log_bound - 2 * a.log_bound) < 1e-9


def test_no_underflow_at_large_n():
    b = short_path_bound(0.01, 0.3, 0.2, 100_000)
    assert b.bound == 0.0 and math.isfinite(b.log_bound)


def test_two_lambda_variant():
    b = short_path_bound(0.1, 0.3, 0.2, 10)
    assert abs(b.two_lambda_bound - 0.4 ** 10) < 1e-15


def test_parameter_domain():
    with pytest.raises(ValueError):
        cheap_path_base(0.4, 0.3, 0.2)
    with pytest.raises(ValueError):
        cheap_path_base(0.1, 0.3, 1.5)
    with pytest.raises(ValueError):
        short_path_bound(0.1, 0.3, 0.2, 0)


def test_path_count_bound_arithmetic():
    assert path_count_bound(3, 2) == 4 ** 6 == 4096
    assert path_count_bound(3, 3) > path_count_bound(3, 2)
    assert path_count_bound(4, 2) > path_count_bound(3, 2)
    assert abs(log_path_count_bound(3, 2) - math.log(4096)) < 1e-12


def test_count_oracle_below_bound():
    tree = gen_regular_tree(3, 4)
    for n in (1, 2, 3):
        assert count_paths_near(tree.graph, tree.origin, n) <= path_count_bound(3, n)
    box = gen_lattice_box(2, 3)
    for n in (1, 2, 3):
        assert count_paths_near(box.graph, box.origin, n) <= path_count_bound(4, n)


def test_lln_slack_zero_when_constant_at_mean():
    b = gen_lattice_box(1, 10)
    w = constant_weights(b.graph, np.ones(20), "unit")
    assert lln_slack(b.graph, w, b.geodesic, 1.0) == 0.0


def test_lln_slack_single_heavy_edge():
    b = gen_lattice_box(1, 10)
    vals = np.full(20, 1e-4)
    vals[7] = 2 * 0.5 + 5.0
    w = constant_weights(b.graph, vals, "spike")
    got = lln_slack(b.graph, w, b.geodesic, 0.5)
    assert abs(got - 5.0) < 0.01


def test_lln_slack_monotone_under_extension():
    b = gen_lattice_box(1, 50)
    d = EdgeDistribution.make("exponential", rate=1.0)
    w = sample_weights(b.graph, d, SeedSpec(5, 0))
    prev = -1.0
    for length in (20, 40, 60, 80, 100):
        cur = lln_slack(b.graph, w, b.geodesic.subpath(0, length), 1.0)
        assert cur >= prev - 1e-12
        prev = cur


def test_lln_slack_matches_quadratic_oracle():
    b = gen_lattice_box(1, 30)
    d = EdgeDistribution.make("exponential", rate=1.0)
    w = sample_weights(b.graph, d, SeedSpec(6, 0))
    geo = b.geodesic
    wts = [w.weights[b.graph.edge_id(a, bb)]
           for a, bb in zip(geo.vertices, geo.vertices[1:])]
    prefix = np.concatenate([[0.0], np.cumsum(wts)])
    brute = max(
        prefix[j] - prefix[i] - 2 * 1.0 * (j - i)
        for i in range(len(prefix))
        for j in range(i, len(prefix))
    )
    assert abs(lln_slack(b.graph, w, geo, 1.0) - max(brute, 0.0)) < 1e-12


def test_lln_requires_self_avoiding():
    from fpplab.graphs import Graph, Path

    g = Graph(3, [(0, 1), (1, 2)])
    w = constant_weights(g, np.ones(2), "unit")
    with pytest.raises(ValueError, match="self-avoiding"):
        lln_slack(g, w, Path(g, [0, 1, 0]), 1.0)


def test_envelope_two_point_example():
    fit = fit_linear_envelope([(10, 9.0), (20, 19.0)], step=0.05)
    assert abs(fit.slope - 0.95) < 1e-12
    assert abs(fit.slack - 0.5) < 1e-12


def test_envelope_on_the_line():
    fit = fit_linear_envelope([(5, 5.0), (10, 10.0), (20, 20.0)], step=0.05)
    assert abs(fit.slope - 1.0) < 1e-12
    assert fit.slack == 0.0


def test_envelope_ignores_sample_above():
    base = [(10, 9.0), (20, 19.0)]
    fit0 = fit_linear_envelope(base, step=0.05)
    fit1 = fit_linear_envelope(base + [(15, 30.0)], step=0.05)
    assert fit0.slope == fit1.slope and fit0.slack == fit1.slack


def test_envelope_inequality_holds_postfit():
    rng = np.random.default_rng(5)
    samples = [(int(h), float(h * 0.8 + rng.uniform(0, 2))) for h in
               rng.integers(5, 60, size=40)]
    fit = fit_linear_envelope(samples)
    for h, v in samples:
        assert v >= fit.slope * h - fit.slack - 1e-9


def test_envelope_degenerate_rejected():
    with pytest.raises(ValueError, match="degenerate"):
        fit_linear_envelope([(10, 9.0)])
    with pytest.raises(ValueError, match="degenerate"):
        fit_linear_envelope([(10, 9.0), (10, 11.0)])
