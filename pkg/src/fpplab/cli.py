"""Configuration-driven experiment runner.

Subcommands:
    run       execute the experiment in a TOML/JSON config, write results
    describe  print the constructed space's vital statistics
    gen       dump a configured space to an annotated edge-list file
    bounds    evaluate the closed-form bounds from flags

Exit codes: 0 success, 2 invalid config, 3 infeasible experiment,
1 runtime failure.  Results go to stdout and files only; stderr carries
diagnostics.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import sys
from pathlib import Path as FsPath

from . import __version__
from .bounds import log_path_count_bound, path_count_bound, short_path_bound
from .experiments import (
    ExperimentConfig,
    FeasibilityError,
    bubble_avoidance_check,
    empirical_short_path_probability,
    geodesic_stabilization,
    midpoint_probability,
    sample_opposite_pairs,
    variance_profile,
)
from .generators import GraphBundle, SizeBudgetError, dump_edge_list, make_bundle
from .weights import validate_distribution


class ConfigError(ValueError):
    pass


def load_config(path: str) -> dict:
    p = FsPath(path)
    if not p.exists():
        raise ConfigError(f"{path}: no such file")
    text = p.read_text()
    if p.suffix == ".json":
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{exc.lineno}: {exc.msg}") from exc
    try:
        import tomllib as toml  # py >= 3.11
    except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
        import tomli as toml
    try:
        return toml.loads(text)
    except toml.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def config_hash(cfg: dict) -> str:
    canon = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _require(cfg: dict, key: str, where: str):
    if key not in cfg:
        raise ConfigError(f"missing '{key}' in [{where}]")
    return cfg[key]


def _build_bundle(cfg: dict) -> GraphBundle:
    graph_cfg = _require(cfg, "graph", "config")
    try:
        return make_bundle(graph_cfg)
    except SizeBudgetError:
        raise
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"[graph]: {exc}") from exc


def _experiment_config(cfg: dict, bundle, seed_override, threads) -> ExperimentConfig:
    exp = _require(cfg, "experiment", "config")
    dist_cfg = _require(cfg, "distribution", "config")
    try:
        dist = validate_distribution(dist_cfg)
    except ValueError as exc:
        raise ConfigError(f"[distribution]: {exc}") from exc
    seed = seed_override if seed_override is not None else _require(
        exp, "seed", "experiment")
    return ExperimentConfig(
        bundle=bundle,
        distribution=dist,
        master_seed=int(seed),
        trials=int(_require(exp, "trials", "experiment")),
        n_values=tuple(_require(exp, "n_values", "experiment")),
        crossing_radius=int(exp.get("crossing_radius", 0)),
        margin=int(exp.get("margin", 0)),
        name=str(cfg.get("name", "experiment")),
        threads=threads,
        co_optimal=bool(exp.get("co_optimal", False)),
    )


def _format_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if hasattr(v, "item"):  # numpy scalar
        return _format_cell(v.item())
    return str(v)


def write_csv(rows: list, columns: list, path: FsPath) -> None:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(_format_cell(row[c]) for c in columns))
    path.write_text("\n".join(lines) + "\n")


def write_json(obj, path: FsPath) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    name = str(cfg.get("name", "experiment"))
    exp = _require(cfg, "experiment", "config")
    kind = _require(exp, "type", "experiment")
    out_dir = FsPath(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = datetime.datetime.now(datetime.timezone.utc).isoformat()

    if kind == "short_path":
        dist = validate_distribution(_require(cfg, "distribution", "config"))
        seed = args.seed if args.seed is not None else _require(
            exp, "seed", "experiment")
        result = empirical_short_path_probability(
            n=int(_require(exp, "path_length", "experiment")),
            dist=dist,
            eps=float(_require(exp, "eps", "experiment")),
            trials=int(_require(exp, "trials", "experiment")),
            seed=int(seed),
            threads=args.threads,
        )
        summary = {
            "config": result.config,
            "estimate": result.estimate,
            "standard_error": result.standard_error,
            "bound": result.bound,
            "base": result.base,
            "delta": result.delta,
            "lambda": result.lam,
            "valid": result.valid,
        }
        rows, columns = result.rows, ["n", "eps", "trials", "hits",
                                      "estimate", "bound"]
    elif kind == "bubble_avoidance":
        bundle = _build_bundle(cfg)
        if "bubble_weights" not in bundle.meta:
            raise ConfigError("bubble_avoidance needs [graph] kind = 'bubble'")
        weights = bundle.meta["bubble_weights"]
        seed = args.seed if args.seed is not None else _require(
            exp, "seed", "experiment")
        pairs = sample_opposite_pairs(
            bundle,
            count=int(exp.get("pair_count", 20)),
            seed=int(seed),
            min_norm=int(bundle.meta["bubble_spec"].sizes[-1]),
        )
        result = bubble_avoidance_check(
            bundle, weights, pairs,
            contour_indices=exp.get("bubbles"),
        )
        summary = {"config": result.config, "all_verified": result.all_verified}
        rows, columns = result.rows, ["u", "v", "bubble", "d_omega",
                                      "d_restricted", "agree", "none_enter"]
    else:
        bundle = _build_bundle(cfg)
        run_cfg = _experiment_config(cfg, bundle, args.seed, args.threads)
        if kind == "midpoint":
            result = midpoint_probability(run_cfg)
            summary = {"config": result.config, "per_n": result.per_n,
                       "constants": result.constants}
            rows, columns = result.rows, result.row_columns()
        elif kind == "stabilization":
            result = geodesic_stabilization(run_cfg)
            summary = {
                "config": result.config,
                "stabilized_count": result.stabilized_count,
                "stabilized_fraction": result.stabilized_fraction,
            }
            rows, columns = result.rows, ["trial", "n", "core_size", "core",
                                          "stabilized"]
        elif kind == "variance":
            result = variance_profile(run_cfg)
            summary = {"config": result.config, "per_n": result.per_n,
                       "slope": result.slope,
                       "slope_stderr": result.slope_stderr}
            rows, columns = result.rows, ["n", "trial", "d_omega"]
        else:
            raise ConfigError(f"unknown experiment type {kind!r}")

    csv_path = out_dir / f"{name}.csv"
    summary_path = out_dir / f"{name}.summary.json"
    write_csv(rows, columns, csv_path)
    write_json(summary, summary_path)
    manifest = {
        "config_path": str(args.config),
        "config_sha256": config_hash(cfg),
        "version": __version__,
        "started": started,
        "finished": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "outputs": [csv_path.name, summary_path.name],
    }
    manifest_path = out_dir / f"{name}.manifest.json"
    write_json(manifest, manifest_path)
    print(json.dumps({"wrote": [str(csv_path), str(summary_path),
                                str(manifest_path)]}))
    return 0


def cmd_describe(args) -> int:
    cfg = load_config(args.config)
    bundle = _build_bundle(cfg)
    print(json.dumps(bundle.describe(), sort_keys=True, indent=2))
    return 0


def cmd_gen(args) -> int:
    cfg = load_config(args.config)
    bundle = _build_bundle(cfg)
    dump_edge_list(bundle, args.out)
    print(json.dumps({"wrote": args.out,
                      "vertices": bundle.graph.vertex_count,
                      "edges": bundle.graph.edge_count}))
    return 0


def cmd_bounds(args) -> int:
    out = {}
    if args.eps is not None:
        b = short_path_bound(args.eps, args.delta, args.lam, args.n)
        out["short_path"] = {
            "eps": b.eps, "delta": b.delta, "lambda": b.lam, "n": b.n,
            "base": b.base, "log_bound": b.log_bound, "bound": b.bound,
            "two_lambda_bound": b.two_lambda_bound,
        }
    if args.max_degree is not None:
        exact = path_count_bound(args.max_degree, args.count_n)
        out["path_count"] = {
            "max_degree": args.max_degree,
            "n": args.count_n,
            "bound": str(exact),
            "log_bound": log_path_count_bound(args.max_degree, args.count_n),
        }
    if not out:
        raise ConfigError("bounds: nothing to compute "
                          "(need --eps/--delta/--lam/--n or --max-degree/--count-n)")
    print(json.dumps(out, sort_keys=True, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fpplab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a configured experiment")
    run.add_argument("--config", required=True)
    run.add_argument("--out", default=".")
    run.add_argument("--threads", type=int, default=1,
                     help="worker threads (affects speed only, never results)")
    run.add_argument("--seed", type=int, default=None,
                     help="override the config's master seed")
    run.set_defaults(func=cmd_run)

    desc = sub.add_parser("describe", help="describe a configured space")
    desc.add_argument("--config", required=True)
    desc.set_defaults(func=cmd_describe)

    gen = sub.add_parser("gen", help="dump a configured space as an edge list")
    gen.add_argument("--config", required=True)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_gen)

    bnd = sub.add_parser("bounds", help="evaluate closed-form bounds")
    bnd.add_argument("--eps", type=float, default=None)
    bnd.add_argument("--delta", type=float, default=0.3)
    bnd.add_argument("--lam", type=float, default=0.2)
    bnd.add_argument("--n", type=int, default=1)
    bnd.add_argument("--max-degree", type=int, default=None)
    bnd.add_argument("--count-n", type=int, default=1)
    bnd.set_defaults(func=cmd_bounds)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (FeasibilityError, SizeBudgetError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
