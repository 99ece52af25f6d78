import io
import math

import numpy as np
import pytest

from fpplab.experiments import (
    ExperimentConfig,
    FeasibilityError,
    bubble_avoidance_check,
    empirical_short_path_probability,
    geodesic_stabilization,
    midpoint_probability,
    sample_opposite_pairs,
    variance_profile,
)
from fpplab.generators import (
    BubbleSpec,
    gen_bubble_lattice,
    gen_lattice_box,
    gen_regular_tree,
    load_edge_list,
)
from fpplab.weights import EdgeDistribution

EXPO = EdgeDistribution.make("exponential", rate=1.0)


def tree_config(**kw):
    args = dict(
        bundle=gen_regular_tree(3, 6),
        distribution=EXPO,
        master_seed=77,
        trials=25,
        n_values=(4, 6, 8),
        crossing_radius=0,
    )
    args.update(kw)
    return ExperimentConfig(**args)


def test_config_infeasible_scale():
    with pytest.raises(FeasibilityError, match="safe_radius"):
        ExperimentConfig(
            bundle=gen_lattice_box(2, 6),
            distribution=EXPO,
            master_seed=1,
            trials=5,
            n_values=(10,),
            crossing_radius=3,
        )
    with pytest.raises(FeasibilityError, match="geodesic length"):
        tree_config(n_values=(40,))
    with pytest.raises(FeasibilityError, match="trial count"):
        tree_config(trials=0)


def test_tree_midpoint_always_crosses():
    r = midpoint_probability(tree_config())
    assert [p["p_hat"] for p in r.per_n] == [1.0, 1.0, 1.0]
    assert all(p["excluded"] == 0 for p in r.per_n)


def test_midpoint_monotone_in_crossing_radius():
    z = gen_lattice_box(2, 12)
    rows = {}
    for k in (1, 3):
        cfg = ExperimentConfig(bundle=z, distribution=EXPO, master_seed=5,
                               trials=40, n_values=(8,), crossing_radius=k)
        rows[k] = midpoint_probability(cfg).rows
    # trial for trial: crossing a bigger ball dominates
    for r1, r3 in zip(rows[1], rows[3]):
        assert r3["crossed"] >= r1["crossed"]


def test_midpoint_rows_reproducible_and_thread_invariant():
    z = gen_lattice_box(2, 10)
    mk = lambda th: ExperimentConfig(bundle=z, distribution=EXPO, master_seed=9,
                                     trials=30, n_values=(4, 8), crossing_radius=2,
                                     threads=th)
    a = midpoint_probability(mk(1))
    b = midpoint_probability(mk(4))
    assert a.rows == b.rows
    assert a.per_n == b.per_n


def test_midpoint_crossing_indicator_scale_invariant():
    z = gen_lattice_box(2, 10)
    base = ExperimentConfig(bundle=z, distribution=EXPO, master_seed=13,
                            trials=25, n_values=(6,), crossing_radius=2)
    scaled = ExperimentConfig(bundle=z, distribution=EXPO.scaled(3.0),
                              master_seed=13, trials=25, n_values=(6,),
                              crossing_radius=2)
    ra, rb = midpoint_probability(base), midpoint_probability(scaled)
    for x, y in zip(ra.rows, rb.rows):
        assert x["crossed"] == y["crossed"]
        assert x["hops"] == y["hops"]


def test_midpoint_co_optimal_mode():
    z = gen_lattice_box(2, 8)
    cfg = ExperimentConfig(bundle=z, distribution=EXPO, master_seed=2,
                           trials=10, n_values=(4,), crossing_radius=1,
                           co_optimal=True)
    r = midpoint_probability(cfg)
    for row in r.rows:
        assert row["crossed_any"] >= row["crossed"]


def test_stabilization_tree_total():
    r = geodesic_stabilization(tree_config(crossing_radius=2))
    assert r.stabilized_count == len(r.trials)
    for tr in r.trials:
        # the stable core is carried by every tested scale's geodesic
        for n, path in tr["paths"].items():
            assert set(tr["stable_core"]) <= set(path)


def test_stabilization_needs_three_scales():
    with pytest.raises(FeasibilityError, match="3 scales"):
        geodesic_stabilization(tree_config(n_values=(4, 6)))


def test_short_path_impossible_event_is_zero():
    uni = EdgeDistribution.make("uniform", low=1.0, high=2.0)
    r = empirical_short_path_probability(20, uni, 0.5, 2000, seed=3)
    assert r.estimate == 0.0
    assert r.valid


def test_short_path_single_edge_matches_cdf():
    r = empirical_short_path_probability(1, EXPO, 0.1, 40_000, seed=3)
    want = 1 - math.exp(-0.1)
    assert abs(r.estimate - want) < 5 * math.sqrt(want * (1 - want) / 40_000)


def test_short_path_bound_holds():
    r = empirical_short_path_probability(50, EXPO, 0.1, 20_000, seed=4)
    assert r.valid
    assert r.estimate <= r.bound + 4 * r.standard_error


def test_variance_constant_distribution_is_zero():
    cfg = ExperimentConfig(
        bundle=gen_lattice_box(2, 8),
        distribution=EdgeDistribution.make("constant", value=2.0),
        master_seed=6,
        trials=12,
        n_values=(4, 6, 8),
    )
    r = variance_profile(cfg)
    assert all(p["variance"] == 0.0 for p in r.per_n)
    assert r.slope is None


def test_variance_single_edge_matches_distribution():
    bundle = load_edge_list(io.StringIO("# origin 0\n# geodesic 0 1\n0 1\n"))
    cfg = ExperimentConfig(bundle=bundle, distribution=EXPO, master_seed=8,
                           trials=4000, n_values=(1, 1, 1))
    r = variance_profile(cfg)
    var = r.per_n[0]["variance"]
    # exp(1) has variance 1; the sample variance concentrates around it
    assert abs(var - 1.0) < 0.15


def test_bubble_avoidance_exact():
    bundle, w = gen_bubble_lattice(30, BubbleSpec(sizes=(4,)))
    pairs = sample_opposite_pairs(bundle, 8, seed=21, min_norm=4)
    r = bubble_avoidance_check(bundle, w, pairs)
    assert r.all_verified
    assert all(row["none_enter"] for row in r.rows)


def test_bubble_adjacent_pair_trivially_avoids():
    bundle, w = gen_bubble_lattice(30, BubbleSpec(sizes=(4,)))
    coords = bundle.meta["coords"]

    def vid(x, y):
        return int(np.nonzero((coords[:, 0] == x) & (coords[:, 1] == y))[0][0])

    r = bubble_avoidance_check(bundle, w, [(vid(20, 1), vid(20, -1))])
    assert r.all_verified


def test_bubble_crop_brute_force():
    # tiny box: check the restricted-equals-unrestricted verdict against
    # direct enumeration over simple paths
    bundle, w = gen_bubble_lattice(6, BubbleSpec(sizes=(1,)))
    coords = bundle.meta["coords"]

    def vid(x, y):
        return int(np.nonzero((coords[:, 0] == x) & (coords[:, 1] == y))[0][0])

    u, v = vid(-3, 1), vid(3, -1)
    r = bubble_avoidance_check(bundle, w, [(u, v)])
    row = r.rows[0]

    # enumeration on the crop [-3, 3]^2
    g = bundle.graph
    sup = np.abs(coords).max(axis=1)
    best = math.inf
    best_avoiding = math.inf
    stack = [(u, (u,), 0.0)]
    while stack:
        x, path, total = stack.pop()
        if total >= best_avoiding and total >= best:
            continue
        if x == v:
            best = min(best, total)
            if all(sup[p] >= 1 for p in path):
                best_avoiding = min(best_avoiding, total)
            continue
        for nb in g.neighbors(x):
            nb = int(nb)
            if nb in path or abs(coords[nb][0]) > 3 or abs(coords[nb][1]) > 3:
                continue
            stack.append((nb, path + (nb,), total + w.weights[g.edge_id(x, nb)]))
    assert abs(row["d_omega"] - best) <= 1e-9
    assert row["agree"] == int(abs(best_avoiding - best) <= 1e-9)


def test_bubble_rejects_pairs_inside():
    bundle, w = gen_bubble_lattice(30, BubbleSpec(sizes=(4,)))
    coords = bundle.meta["coords"]
    inside = int(np.nonzero((coords[:, 0] == 0) & (coords[:, 1] == 1))[0][0])
    outside = int(np.nonzero((coords[:, 0] == 20) & (coords[:, 1] == 1))[0][0])
    with pytest.raises(ValueError, match="outside"):
        bubble_avoidance_check(bundle, w, [(inside, outside)])
