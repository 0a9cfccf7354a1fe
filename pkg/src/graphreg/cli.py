"""Command-line front end.

Commands: ``simulate``, ``estimate-graph``, ``tune``, ``consensus``,
``benchmark``.  Options may come from a JSON config file (``--config``);
explicit command-line flags win over config values.  Exit codes: 0 success,
1 usage or configuration error, 2 runtime failure.
"""

import argparse
import json
import os
import shutil
import sys

import numpy as np

from .evaluate import SplitScheme, benchmark_scenario, make_splits, summarize, tune
from .exceptions import GraphregError
from .graph_select import MbConfig, consensus, mb_estimate
from .io import (
    read_dataset_csv,
    read_graph_csv,
    read_problem_json,
    write_dataset_csv,
    write_detail_csv,
    write_edge_counts_csv,
    write_graph_csv,
    write_problem_json,
    write_report_json,
    write_summary_csv,
)
from .models import MODEL_KINDS
from .simulate import SCENARIO_KINDS, ScenarioSpec, make_problem, sample_dataset, standardize
from .solver import SolverConfig


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser():
    parser = _Parser(prog="graphreg", description=__doc__)
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--seed", type=int, dest="global_seed")
    parser.add_argument("--out", dest="global_out")
    parser.add_argument("--threads", type=int, dest="global_threads")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="generate synthetic problems and datasets")
    sim.add_argument("--scenario", choices=SCENARIO_KINDS)
    sim.add_argument("--p", type=int)
    sim.add_argument("--parents", type=int)
    sim.add_argument("--reps", type=int)
    sim.add_argument("--n", type=int)
    sim.add_argument("--noise-sd", type=float)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--out")

    est = sub.add_parser("estimate-graph", help="neighborhood-selection graph estimate")
    est.add_argument("--data")
    est.add_argument("--mb-lambda", type=float)
    est.add_argument("--rule", choices=("or", "and"))
    est.add_argument("--out")

    tun = sub.add_parser("tune", help="grid-tune one model on one dataset")
    tun.add_argument("--data")
    tun.add_argument("--graph", help="edge-list CSV path, or 'estimate'")
    tun.add_argument("--model", choices=MODEL_KINDS)
    tun.add_argument("--truth", help="problem JSON with true coefficients")
    tun.add_argument("--splits", choices=("fixed", "segments"))
    tun.add_argument("--train", type=int)
    tun.add_argument("--val", type=int)
    tun.add_argument("--test", type=int)
    tun.add_argument("--segments", type=int)
    tun.add_argument("--n-lambda", type=int)
    tun.add_argument("--n-xi", type=int)
    tun.add_argument("--n-alpha", type=int)
    tun.add_argument("--c", type=float)
    tun.add_argument("--xi-max", type=float)
    tun.add_argument("--lambda-min-ratio", type=float)
    tun.add_argument("--mb-lambda", type=float)
    tun.add_argument("--seed", type=int)
    tun.add_argument("--out")

    con = sub.add_parser("consensus", help="aggregate estimated graphs")
    con.add_argument("graphs", nargs="+")
    con.add_argument("--threshold", type=int)
    con.add_argument("--total", type=int, help="expected number of input graphs")
    con.add_argument("--p", type=int)
    con.add_argument("--out")

    ben = sub.add_parser("benchmark", help="simulate, estimate graphs, tune all models")
    ben.add_argument("--scenario", choices=SCENARIO_KINDS)
    ben.add_argument("--models")
    ben.add_argument("--p", type=int)
    ben.add_argument("--parents", type=int)
    ben.add_argument("--reps", type=int)
    ben.add_argument("--n", type=int)
    ben.add_argument("--train", type=int)
    ben.add_argument("--val", type=int)
    ben.add_argument("--test", type=int)
    ben.add_argument("--noise-sd", type=float)
    ben.add_argument("--graph", choices=("true", "estimate"))
    ben.add_argument("--mb-lambda", type=float)
    ben.add_argument("--n-lambda", type=int)
    ben.add_argument("--n-xi", type=int)
    ben.add_argument("--n-alpha", type=int)
    ben.add_argument("--threads", type=int)
    ben.add_argument("--seed", type=int)
    ben.add_argument("--out")
    return parser


def _load_config(path):
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        raise UsageError(f"cannot read config {path}: {err}") from err


def _pick(args, config, key, default=None, required=False):
    value = getattr(args, key.replace("-", "_"), None)
    if value is None and key in ("seed", "out", "threads"):
        value = getattr(args, f"global_{key}", None)
    if value is None:
        value = config.get(key, config.get(key.replace("-", "_"), default))
    if required and value is None:
        raise UsageError(f"missing required option --{key}")
    return value


def _grid_kwargs(args, config):
    grid = dict(config.get("grid", {}))
    out = {}
    for key in ("n_lambda", "n_xi", "n_alpha", "c", "xi_max", "lambda_min_ratio"):
        flag = getattr(args, key, None)
        value = flag if flag is not None else grid.get(key)
        if value is not None:
            out[key] = value
    weights = config.get("weights", "inverse_cov")
    if weights != "inverse_cov":
        raise UsageError(f"unsupported weights rule {weights!r}")
    return out


def _cmd_simulate(args, config):
    scenario = _pick(args, config, "scenario", required=True)
    p = int(_pick(args, config, "p", 100))
    parents = int(_pick(args, config, "parents", 10))
    reps = int(_pick(args, config, "reps", 10))
    n = int(_pick(args, config, "n", 560))
    noise_sd = float(_pick(args, config, "noise-sd", 5.0))
    seed = _pick(args, config, "seed")
    if seed is None:
        raise UsageError("simulate is stochastic: --seed is required")
    seed = int(seed)
    out = _pick(args, config, "out", required=True)
    created = []
    try:
        index = 0
        for g in range(parents):
            problem = make_problem(ScenarioSpec(kind=scenario, p=p, seed=seed + g))
            for r in range(reps):
                rep_dir = os.path.join(out, scenario, f"parent{g}", f"rep{r}")
                os.makedirs(rep_dir, exist_ok=True)
                created.append(rep_dir)
                dataset = sample_dataset(problem, n, noise_sd=noise_sd, seed=seed + index)
                write_problem_json(problem, os.path.join(rep_dir, "problem.json"))
                write_dataset_csv(dataset, os.path.join(rep_dir, "dataset.csv"))
                write_graph_csv(problem.graph, os.path.join(rep_dir, "graph.csv"))
                index += 1
    except Exception:
        for path in created:
            shutil.rmtree(path, ignore_errors=True)
        raise
    print(f"wrote {index} datasets under {out}/{scenario}")
    return 0


def _cmd_estimate_graph(args, config):
    data_path = _pick(args, config, "data", required=True)
    lam = float(_pick(args, config, "mb-lambda", 0.5))
    rule = _pick(args, config, "rule", "or")
    out = _pick(args, config, "out", required=True)
    dataset = read_dataset_csv(data_path)
    std = standardize(dataset, np.arange(dataset.n))
    graph = mb_estimate(std.X, MbConfig(lam=lam, rule=f"{rule}_rule"))
    write_graph_csv(graph, out)
    print(f"estimated graph: {graph.n_edges} edges -> {out}")
    return 0


def _split_scheme(args, config, n):
    kind = _pick(args, config, "splits", "fixed")
    seed = int(_pick(args, config, "seed", 0) or 0)
    if kind == "fixed":
        train = int(_pick(args, config, "train", 80))
        val = int(_pick(args, config, "val", 80))
        test = int(_pick(args, config, "test", max(1, n - train - val)))
        return SplitScheme(kind="fixed_counts", n_train=train, n_val=val, n_test=test, seed=seed)
    segments = int(_pick(args, config, "segments", 10))
    return SplitScheme(kind="permutation_segments", segments=segments, seed=seed)


def _cmd_tune(args, config):
    data_path = _pick(args, config, "data", required=True)
    model = _pick(args, config, "model", required=True)
    graph_arg = _pick(args, config, "graph", "estimate")
    out = _pick(args, config, "out", required=True)
    dataset = read_dataset_csv(data_path)
    if graph_arg == "estimate":
        lam = float(_pick(args, config, "mb-lambda", 0.5))
        std = standardize(dataset, np.arange(dataset.n))
        graph = mb_estimate(std.X, MbConfig(lam=lam))
    else:
        graph = read_graph_csv(graph_arg, p=dataset.p)
    beta_true = None
    truth = _pick(args, config, "truth")
    if truth:
        beta_true = read_problem_json(truth)["beta_true"]
    scheme = _split_scheme(args, config, dataset.n)
    splits = make_splits(dataset.n, scheme)
    grid_kwargs = _grid_kwargs(args, config)
    os.makedirs(out, exist_ok=True)
    records = []
    for k, split in enumerate(splits):
        report = tune(dataset, graph, model, split, grid_kwargs=grid_kwargs, beta_true=beta_true)
        write_report_json(report, os.path.join(out, f"report_{k:03d}.json"))
        records.append(
            {
                "scenario": "external",
                "model": model,
                "p": dataset.p,
                "parent": 0,
                "dataset_index": k,
                "edges": graph.n_edges,
                "l2_distance": report.l2_distance if report.l2_distance is not None else float("nan"),
                "test_mse": report.test_mse,
                "test_mse_std": report.test_mse_std,
                "val_mse": report.val_mse,
                "nonzero": report.nonzero,
                "lam_max": report.lam_max,
                "seconds": report.wall_time,
                "n_failed": report.n_failed,
            }
        )
    write_detail_csv(records, os.path.join(out, "runs.csv"))
    write_summary_csv(summarize(records), os.path.join(out, "summary.csv"))
    print(f"tuned {model} on {len(splits)} split(s) -> {out}")
    return 0


def _cmd_consensus(args, config):
    threshold = int(_pick(args, config, "threshold", 70))
    total = _pick(args, config, "total")
    if total is not None and int(total) != len(args.graphs):
        raise UsageError(f"--total is {total} but {len(args.graphs)} graphs were given")
    p = _pick(args, config, "p")
    out = _pick(args, config, "out", required=True)
    graphs = []
    p_hint = int(p) if p is not None else None
    if p_hint is None:
        p_hint = 0
        for path in args.graphs:
            g = read_graph_csv(path)
            p_hint = max(p_hint, g.p)
    graphs = [read_graph_csv(path, p=p_hint) for path in args.graphs]
    counts, agreed = consensus(graphs, threshold)
    write_edge_counts_csv(counts, out + ".counts.csv")
    write_graph_csv(agreed, out + ".csv")
    print(f"consensus over {len(graphs)} graphs: {agreed.n_edges} edges kept")
    return 0


def _cmd_benchmark(args, config):
    scenario = _pick(args, config, "scenario", required=True)
    models_arg = _pick(args, config, "models", "srig,sglig,dsrig")
    if isinstance(models_arg, str):
        model_kinds = [m.strip() for m in models_arg.split(",") if m.strip()]
    else:
        model_kinds = list(models_arg)
    for m in model_kinds:
        if m not in MODEL_KINDS:
            raise UsageError(f"unknown model {m!r}")
    p = int(_pick(args, config, "p", 100))
    parents = int(_pick(args, config, "parents", 10))
    reps = int(_pick(args, config, "reps", 1))
    n = int(_pick(args, config, "n", 560))
    counts = (
        int(_pick(args, config, "train", 80)),
        int(_pick(args, config, "val", 80)),
        int(_pick(args, config, "test", 400)),
    )
    noise_sd = float(_pick(args, config, "noise-sd", 5.0))
    seed = _pick(args, config, "seed")
    if seed is None:
        raise UsageError("benchmark is stochastic: --seed is required")
    graph_source = _pick(args, config, "graph", "estimate")
    mb = MbConfig(lam=float(_pick(args, config, "mb-lambda", 0.5)))
    threads = int(_pick(args, config, "threads", os.cpu_count() or 1))
    out = _pick(args, config, "out", required=True)
    grids = {}
    n_lambda = _pick(args, config, "n-lambda")
    n_xi = _pick(args, config, "n-xi")
    n_alpha = _pick(args, config, "n-alpha")
    for model in model_kinds:
        kwargs = {}
        if n_lambda is not None and model in ("srig", "dsrig"):
            kwargs["n_lambda"] = int(n_lambda)
        if n_xi is not None and model == "dsrig":
            kwargs["n_xi"] = int(n_xi)
        if n_alpha is not None and model == "sglig":
            kwargs["n_alpha"] = int(n_alpha)
        grids[model] = kwargs
    records, summary = benchmark_scenario(
        scenario,
        model_kinds,
        p=p,
        n_parents=parents,
        reps=reps,
        n=n,
        counts=counts,
        noise_sd=noise_sd,
        seed=int(seed),
        graph_source=graph_source,
        mb=mb,
        grids=grids,
        solver=SolverConfig(),
        n_jobs=threads,
    )
    os.makedirs(out, exist_ok=True)
    write_detail_csv(records, os.path.join(out, "detail.csv"))
    write_summary_csv(summary, os.path.join(out, "summary.csv"))
    for row in summary:
        print(
            f"{row['scenario']},{row['model']}: l2={row['l2_distance']:.3f} "
            f"mse={row['test_mse']:.3f} sec={row['seconds']:.2f}"
        )
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "estimate-graph": _cmd_estimate_graph,
    "tune": _cmd_tune,
    "consensus": _cmd_consensus,
    "benchmark": _cmd_benchmark,
}


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        config = _load_config(args.config)
        return _COMMANDS[args.command](args, config)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (GraphregError, OSError, ValueError) as err:
        print(f"failure: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
