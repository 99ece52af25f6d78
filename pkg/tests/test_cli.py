import json

import pytest

from fpplab.cli import main
from fpplab.generators import load_edge_list

TREE_CFG = """\
name = "tree_run"

[graph]
kind = "tree"
degree = 3
depth = 5

[distribution]
kind = "exponential"
rate = 1.0

[experiment]
type = "midpoint"
seed = 314159
trials = 12
n_values = [4, 6]
crossing_radius = 0
"""


@pytest.fixture
def tree_config(tmp_path):
    p = tmp_path / "tree.toml"
    p.write_text(TREE_CFG)
    return p


def test_run_twice_byte_identical(tree_config, tmp_path, capsys):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", str(tree_config), "--out", str(out1)]) == 0
    assert main(["run", "--config", str(tree_config), "--out", str(out2),
                 "--threads", "3"]) == 0
    for name in ("tree_run.csv", "tree_run.summary.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    m1 = json.loads((out1 / "tree_run.manifest.json").read_text())
    m2 = json.loads((out2 / "tree_run.manifest.json").read_text())
    assert m1["config_sha256"] == m2["config_sha256"]
    assert set(m1["outputs"]) == {"tree_run.csv", "tree_run.summary.json"}


def test_run_tree_crosses_everywhere(tree_config, tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["run", "--config", str(tree_config), "--out", str(out)]) == 0
    summary = json.loads((out / "tree_run.summary.json").read_text())
    assert all(p["p_hat"] == 1.0 for p in summary["per_n"])
    csv_lines = (out / "tree_run.csv").read_text().splitlines()
    assert csv_lines[0] == "n,trial,crossed,excluded,d_omega,hops"
    assert len(csv_lines) == 1 + 12 * 2


def test_seed_override_changes_results(tree_config, tmp_path, capsys):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(["run", "--config", str(tree_config), "--out", str(out1)])
    main(["run", "--config", str(tree_config), "--out", str(out2),
          "--seed", "999"])
    assert (out1 / "tree_run.csv").read_text() != (out2 / "tree_run.csv").read_text()


def test_describe_counts(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text('[graph]\nkind = "lattice"\ndim = 2\nhalf_width = 1\n')
    assert main(["describe", "--config", str(cfg)]) == 0
    got = json.loads(capsys.readouterr().out)
    assert got["vertices"] == 9 and got["edges"] == 12

    cfg.write_text('[graph]\nkind = "tree"\ndegree = 3\ndepth = 8\n')
    assert main(["describe", "--config", str(cfg)]) == 0
    got = json.loads(capsys.readouterr().out)
    assert got["vertices"] == 766


def test_describe_tiling_matches_oracle(tmp_path, capsys):
    from .test_generators import oracle_triangular_layers

    cfg = tmp_path / "c.toml"
    cfg.write_text('[graph]\nkind = "tiling"\np = 3\nq = 7\nlayers = 2\n')
    assert main(["describe", "--config", str(cfg)]) == 0
    got = json.loads(capsys.readouterr().out)
    assert got["vertices"] == 3 + sum(oracle_triangular_layers(7, 2))


def test_gen_round_trip(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text('[graph]\nkind = "tiling"\np = 3\nq = 7\nlayers = 2\n')
    out = tmp_path / "tiling.edges"
    assert main(["gen", "--config", str(cfg), "--out", str(out)]) == 0
    bundle = load_edge_list(out)
    assert bundle.graph.vertex_count == 48


def test_invalid_config_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text("name = [unclosed\n")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "config error" in err

    missing = tmp_path / "missing.toml"
    missing.write_text('[graph]\nkind = "tree"\ndegree = 3\ndepth = 4\n')
    assert main(["run", "--config", str(missing), "--out", str(tmp_path)]) == 2


def test_infeasible_exit_3_names_bound(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text(
        'name = "x"\n'
        '[graph]\nkind = "lattice"\ndim = 2\nhalf_width = 5\n'
        '[distribution]\nkind = "exponential"\nrate = 1.0\n'
        '[experiment]\ntype = "midpoint"\nseed = 1\ntrials = 3\n'
        "n_values = [8]\ncrossing_radius = 3\n"
    )
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path)]) == 3
    assert "safe_radius" in capsys.readouterr().err


def test_bounds_subcommand(capsys):
    assert main(["bounds", "--eps", "0.1", "--delta", "0.3", "--lam", "0.2",
                 "--n", "50", "--max-degree", "3", "--count-n", "2"]) == 0
    got = json.loads(capsys.readouterr().out)
    assert got["path_count"]["bound"] == "4096"
    assert 0 < got["short_path"]["bound"] < 1


def test_results_not_on_stderr(tree_config, tmp_path, capsys):
    main(["run", "--config", str(tree_config), "--out", str(tmp_path / "o")])
    assert capsys.readouterr().err == ""
