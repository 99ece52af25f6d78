import math

import numpy as np
import pytest

from fpplab.generators import gen_lattice_box
from fpplab.graphs import Graph
from fpplab.weights import (
    EdgeDistribution,
    SeedSpec,
    cdf_probe,
    constant_weights,
    sample_weights,
    validate_distribution,
    weight_threshold,
)


def test_exponential_closed_forms():
    d = EdgeDistribution.make("exponential", rate=1.0)
    assert d.mean == 1.0
    assert abs(d.cdf(0.5) - (1 - math.exp(-0.5))) < 1e-15
    assert d.cdf(0.0) == 0.0


def test_uniform_mean_and_support_cdf():
    d = EdgeDistribution.make("uniform", low=1.0, high=2.0)
    assert d.mean == 1.5
    assert cdf_probe(d, 0.5) == 0.0
    assert cdf_probe(d, 2.5) == 1.0


def test_atom_at_zero_rejected():
    with pytest.raises(ValueError, match="atom at zero"):
        EdgeDistribution.make("discrete", values=[0.0, 1.0], probs=[0.5, 0.5])
    with pytest.raises(ValueError, match="atom at zero"):
        EdgeDistribution.make("constant", value=0.0)


def test_infinite_mean_rejected():
    with pytest.raises(ValueError, match="infinite mean"):
        EdgeDistribution.make("pareto", shape=1.0, scale=1.0)


def test_validate_distribution_mapping():
    d = validate_distribution({"kind": "uniform", "low": 1, "high": 2})
    assert d.mean == 1.5
    with pytest.raises(ValueError, match="kind"):
        validate_distribution({"low": 1})


def test_sampling_determinism_and_trial_decorrelation():
    g = gen_lattice_box(2, 20).graph
    d = EdgeDistribution.make("exponential", rate=1.0)
    w0 = sample_weights(g, d, SeedSpec(42, 0))
    w0b = sample_weights(g, d, SeedSpec(42, 0))
    w1 = sample_weights(g, d, SeedSpec(42, 1))
    assert np.array_equal(w0.weights, w0b.weights)
    assert not np.array_equal(w0.weights, w1.weights)
    for w in (w0, w1):
        se = 1.0 / math.sqrt(g.edge_count)
        assert abs(w.weights.mean() - 1.0) < 5 * se


def test_uniform_support_strict():
    g = gen_lattice_box(2, 10).graph
    d = EdgeDistribution.make("uniform", low=1.0, high=2.0)
    w = sample_weights(g, d, SeedSpec(9, 0))
    assert np.all(w.weights > 1.0) and np.all(w.weights < 2.0)


def test_all_weights_strictly_positive():
    g = gen_lattice_box(2, 10).graph
    for spec in (
        {"kind": "exponential", "rate": 2.0},
        {"kind": "discrete", "values": [0.5, 1.5], "probs": [0.25, 0.75]},
        {"kind": "pareto", "shape": 2.5, "scale": 0.5},
    ):
        w = sample_weights(g, validate_distribution(spec), SeedSpec(3, 0))
        assert np.all(w.weights > 0)


def test_empirical_moments_large_sample():
    g = Graph(2, [(0, 1)])
    # one million draws via a synthetic long path graph
    path = gen_lattice_box(1, 500_000).graph
    d = EdgeDistribution.make("exponential", rate=1.0)
    w = sample_weights(path, d, SeedSpec(7, 0))
    m = path.edge_count
    assert abs(w.weights.mean() - d.mean) < 5 / math.sqrt(m)
    var = w.weights.var(ddof=1)
    # Var of the variance estimator for exp(1) is (kurtosis-adjusted) ~ 8/m
    assert abs(var - d.variance()) < 5 * math.sqrt(8.0 / m)


def test_scaled_wrapper_exact_per_weight():
    g = gen_lattice_box(2, 15).graph
    d = EdgeDistribution.make("exponential", rate=1.0)
    s = d.scaled(3.0)
    w = sample_weights(g, d, SeedSpec(5, 2))
    w3 = sample_weights(g, s, SeedSpec(5, 2))
    assert np.array_equal(w3.weights, 3.0 * w.weights)
    assert s.mean == 3.0
    assert abs(s.cdf(3.0) - d.cdf(1.0)) < 1e-15


def test_discrete_sampling_matches_probs():
    g = gen_lattice_box(1, 50_000).graph
    d = EdgeDistribution.make("discrete", values=[1.0, 2.0, 5.0],
                              probs=[0.5, 0.3, 0.2])
    w = sample_weights(g, d, SeedSpec(11, 0))
    m = g.edge_count
    for v, p in ((1.0, 0.5), (2.0, 0.3), (5.0, 0.2)):
        frac = np.mean(w.weights == v)
        assert abs(frac - p) < 5 * math.sqrt(p * (1 - p) / m)


def test_weight_threshold_policy():
    d = EdgeDistribution.make("exponential", rate=1.0)
    delta, lam = weight_threshold(d)
    assert 0.1 <= lam <= 0.3
    assert abs(d.cdf(delta) - lam) < 1e-12
    u = EdgeDistribution.make("uniform", low=1.0, high=2.0)
    delta_u, lam_u = weight_threshold(u)
    assert 0.1 <= lam_u <= 0.3 and 1.0 < delta_u < 2.0
    c = EdgeDistribution.make("constant", value=1.0)
    with pytest.raises(ValueError, match="threshold"):
        weight_threshold(c)


def test_constant_weights_validation():
    g = Graph(3, [(0, 1), (1, 2)])
    with pytest.raises(ValueError, match="length"):
        constant_weights(g, np.ones(3), "bad")
    with pytest.raises(ValueError, match="positive"):
        constant_weights(g, np.array([1.0, 0.0]), "bad")


def test_dump_weights_audit_format():
    import io

    g = Graph(3, [(0, 1), (1, 2)])
    d = EdgeDistribution.make("exponential", rate=1.0)
    w = sample_weights(g, d, SeedSpec(1, 2))
    buf = io.StringIO()
    from fpplab.weights import dump_weights

    dump_weights(w, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("# distribution exponential")
    assert lines[1] == "# master_seed 1 trial 2"
    assert len(lines) == 2 + g.edge_count
    eid, val = lines[2].split()
    assert eid == "0" and float(val) == w.weights[0]
