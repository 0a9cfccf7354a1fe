"""Experiment orchestration: splits, grid tuning, metrics, benchmarks.

Model selection minimizes validation mean squared error on the standardized
scale (standardization is always fit on the training rows only); reports
carry both standardized- and original-scale test errors, plus the l2
distance of the back-transformed coefficients to the truth when a truth is
available.
"""

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError, DivergenceError
from .graph_select import MbConfig, mb_estimate
from .graphs import neighborhoods
from .linalg import extreme_eigs_sym, spectral_norm_sym, stream
from .models import (
    build_grid,
    dsrig_weights,
    lambda_max,
    radii_for,
    shrinkage_key,
    srig_weights,
    ModelSpec,
)
from .simulate import ScenarioSpec, make_problem, sample_dataset, standardize
from .solver import SolverConfig, fit, step_constant

_TAG_SPLIT = 5


@dataclass(frozen=True)
class SplitScheme:
    """Row-splitting protocol.

    ``fixed_counts`` shuffles once and carves (n_train, n_val, n_test)
    disjoint blocks.  ``permutation_segments`` partitions the rows into
    ``segments`` near-equal parts and emits every ordered (test, val) pair
    of distinct segments, training on the rest: 10 segments -> 90 splits.
    """

    kind: str
    n_train: int = None
    n_val: int = None
    n_test: int = None
    segments: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("fixed_counts", "permutation_segments"):
            raise ValueError(f"unknown split scheme {self.kind!r}")
        if self.kind == "fixed_counts":
            for name in ("n_train", "n_val", "n_test"):
                value = getattr(self, name)
                if value is None or value < 1:
                    raise ValueError(f"{name} must be a positive count")
        elif self.segments < 3:
            raise ValueError("need at least 3 segments")


@dataclass
class Split:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray


def make_splits(n, scheme):
    """All (train, val, test) row-index splits of a scheme over n rows."""
    gen = stream(scheme.seed, _TAG_SPLIT)
    perm = gen.permutation(n)
    if scheme.kind == "fixed_counts":
        need = scheme.n_train + scheme.n_val + scheme.n_test
        if need > n:
            raise ValueError(f"split sizes sum to {need} but only {n} rows exist")
        a, b = scheme.n_train, scheme.n_train + scheme.n_val
        return [
            Split(
                train=np.sort(perm[:a]),
                val=np.sort(perm[a:b]),
                test=np.sort(perm[b : b + scheme.n_test]),
            )
        ]
    if scheme.segments > n:
        raise ValueError("more segments than rows")
    segments = np.array_split(perm, scheme.segments)
    splits = []
    for t in range(scheme.segments):
        for v in range(scheme.segments):
            if v == t:
                continue
            train = np.concatenate(
                [segments[s] for s in range(scheme.segments) if s not in (t, v)]
            )
            splits.append(
                Split(train=np.sort(train), val=np.sort(segments[v]), test=np.sort(segments[t]))
            )
    return splits


def select_best(entries, kind):
    """Index of the grid entry with minimal validation MSE.

    Exact ties resolve toward more shrinkage (larger level, then larger
    within-group parameter); failed entries carry infinite MSE and are
    never selected.  Raises ConvergenceError when every entry failed.
    """
    finite = [i for i in range(len(entries)) if np.isfinite(entries[i]["val_mse"])]
    if not finite:
        raise ConvergenceError("every grid point failed to fit")
    best_mse = min(entries[i]["val_mse"] for i in finite)
    tied = [i for i in finite if entries[i]["val_mse"] == best_mse]
    return max(tied, key=lambda i: shrinkage_key(kind, entries[i]["params"]))


def metrics(beta_hat, beta_true, X_test, y_test):
    """(l2 distance to truth, test MSE, nonzero count) for one estimate."""
    beta_hat = np.asarray(beta_hat, dtype=np.float64)
    resid = y_test - X_test @ beta_hat
    mse = float(resid @ resid) / len(y_test)
    l2 = float(np.linalg.norm(beta_hat - beta_true)) if beta_true is not None else None
    nonzero = int(np.count_nonzero(np.abs(beta_hat) > 1e-8))
    return l2, mse, nonzero


@dataclass
class TuningReport:
    kind: str
    entries: list
    best_index: int
    best_params: dict
    beta: np.ndarray
    beta_orig: np.ndarray
    intercept: float
    val_mse: float
    test_mse: float
    test_mse_std: float
    l2_distance: float
    nonzero: int
    lam_max: float
    wall_time: float
    n_failed: int


def _model_weights(kind, X_train, y_train, degrees, rule="inverse_cov"):
    if rule == "inverse_cov":
        return srig_weights(X_train, y_train)
    if rule == "degree_adjusted":
        return dsrig_weights(X_train, y_train, degrees)
    raise ValueError(f"unknown weights rule {rule!r}")


def tune(
    dataset,
    graph,
    kind,
    split,
    grid_kwargs=None,
    solver=SolverConfig(),
    beta_true=None,
    double_radii=False,
    weights_rule="inverse_cov",
):
    """Grid-tune one model on one split and report validation/test metrics.

    Fits run on the training rows with warm starts along each grid chain
    (most to least shrinkage).  A grid point whose fit fails is recorded
    with infinite validation MSE rather than aborting the sweep.  Ties in
    validation MSE resolve toward more shrinkage.
    """
    started = time.perf_counter()
    std = standardize(dataset, split.train)
    X_tr, y_tr = std.X[split.train], std.y[split.train]
    X_val, y_val = std.X[split.val], std.y[split.val]
    X_te = std.X[split.test]
    groups = neighborhoods(graph)
    degrees = np.array([g.degree for g in groups], dtype=np.float64)
    weights = _model_weights(kind, X_tr, y_tr, degrees, weights_rule)
    sigma = step_constant(X_tr)
    # One grid anchor for every model: the level at which this weighted
    # group penalty zeroes all coefficients.  The l1 term only adds
    # shrinkage, so beta = 0 at the anchor is preserved for dsrig/sglig.
    lam_anchor = lambda_max(X_tr, y_tr, groups, weights)
    grid = build_grid(kind, lam_anchor, **(grid_kwargs or {}))

    y_scale = std.scaling.y_scale
    y_val_orig = dataset.y[split.val]
    entries = [None] * len(grid)
    betas = [None] * len(grid)
    n_failed = 0
    for chain in grid.chains:
        warm = None
        for gi in chain:
            params = grid.entries[gi]
            spec = ModelSpec(kind=kind, params=params, weights=weights, groups=groups)
            radii = radii_for(spec, sigma, double_radii=double_radii)
            t0 = time.perf_counter()
            try:
                res = fit(X_tr, y_tr, radii, solver, beta0=warm, sigma=sigma)
            except (ConvergenceError, DivergenceError) as err:
                n_failed += 1
                entries[gi] = {
                    "params": params,
                    "val_mse": float("inf"),
                    "val_mse_orig": float("inf"),
                    "iterations": 0,
                    "seconds": time.perf_counter() - t0,
                    "converged": False,
                    "error": str(err),
                }
                continue
            warm = res.beta
            r_val = y_val - X_val @ res.beta
            val_mse = float(r_val @ r_val) / len(r_val)
            pred_orig = (X_val @ res.beta) * y_scale + std.scaling.y_mean
            r_orig = y_val_orig - pred_orig
            entries[gi] = {
                "params": params,
                "val_mse": val_mse,
                "val_mse_orig": float(r_orig @ r_orig) / len(r_orig),
                "iterations": res.iterations,
                "seconds": time.perf_counter() - t0,
                "converged": res.converged,
            }
            betas[gi] = res.beta

    best = select_best(entries, kind)
    best_mse = entries[best]["val_mse"]

    beta = betas[best]
    beta_orig = beta * y_scale / std.scaling.x_scale
    intercept = std.scaling.y_mean - float(beta_orig @ std.scaling.x_mean)
    r_te = std.y[split.test] - X_te @ beta
    test_mse_std = float(r_te @ r_te) / len(r_te)
    pred = (X_te @ beta) * y_scale + std.scaling.y_mean
    r_orig = dataset.y[split.test] - pred
    test_mse = float(r_orig @ r_orig) / len(r_orig)
    l2 = None
    if beta_true is not None:
        l2 = float(np.linalg.norm(beta_orig - np.asarray(beta_true)))
    return TuningReport(
        kind=kind,
        entries=entries,
        best_index=best,
        best_params=dict(grid.entries[best]),
        beta=beta,
        beta_orig=beta_orig,
        intercept=intercept,
        val_mse=best_mse,
        test_mse=test_mse,
        test_mse_std=test_mse_std,
        l2_distance=l2,
        nonzero=int(np.count_nonzero(np.abs(beta) > 1e-8)),
        lam_max=lam_anchor,
        wall_time=time.perf_counter() - started,
        n_failed=n_failed,
    )


def estimation_error_bound(
    noise_sd, group_opnorm_max, d_min, d_max, weight_max, n_active, p, n, curvature
):
    """Finite-sample bound on ||beta_hat - beta||^2 (diagnostic only).

    (36 / d_min) * noise_sd^2 * group_opnorm_max * (weight_max + sqrt(d_max))^2
    * n_active * (log p + d_max) / (n * curvature).
    """
    values = dict(
        noise_sd=noise_sd,
        group_opnorm_max=group_opnorm_max,
        d_min=d_min,
        d_max=d_max,
        weight_max=weight_max,
        n_active=n_active,
        p=p,
        n=n,
        curvature=curvature,
    )
    for name, value in values.items():
        if not value > 0:
            raise ValueError(f"{name} must be positive, got {value}")
    return (
        (36.0 / d_min)
        * noise_sd**2
        * group_opnorm_max
        * (weight_max + np.sqrt(d_max)) ** 2
        * n_active
        * (np.log(p) + d_max)
        / (n * curvature)
    )


def group_operator_norm_max(X, groups):
    """Max over groups of the largest eigenvalue of X_N' X_N."""
    X = np.asarray(X, dtype=np.float64)
    best = 0.0
    for g in groups:
        sub = X[:, g.members]
        best = max(best, spectral_norm_sym(sub.T @ sub).value)
    return best


def restricted_curvature(X, support):
    """Smallest eigenvalue of X'X/n restricted to the support columns."""
    X = np.asarray(X, dtype=np.float64)
    sub = X[:, np.asarray(support, dtype=np.intp)]
    lam_min, _ = extreme_eigs_sym(sub.T @ sub / X.shape[0])
    return lam_min


def _benchmark_task(args):
    (
        kind, p, seed, parent, dataset_index, n, counts, noise_sd,
        model_kinds, graph_source, mb, grids, solver, double_radii,
    ) = args
    problem = make_problem(ScenarioSpec(kind=kind, p=p, seed=seed + parent))
    data_seed = seed + dataset_index
    dataset = sample_dataset(problem, n, noise_sd=noise_sd, seed=data_seed)
    scheme = SplitScheme(
        kind="fixed_counts",
        n_train=counts[0], n_val=counts[1], n_test=counts[2],
        seed=data_seed,
    )
    split = make_splits(n, scheme)[0]
    if graph_source == "true":
        graph = problem.graph
    else:
        whole = standardize(dataset, np.arange(n))
        graph = mb_estimate(whole.X, mb)
    records = []
    for model in model_kinds:
        report = tune(
            dataset, graph, model, split,
            grid_kwargs=grids.get(model),
            solver=solver,
            beta_true=problem.beta_true,
            double_radii=double_radii,
        )
        records.append(
            {
                "scenario": kind,
                "model": model,
                "p": p,
                "parent": parent,
                "dataset_index": dataset_index,
                "edges": graph.n_edges,
                "l2_distance": report.l2_distance,
                "test_mse": report.test_mse,
                "test_mse_std": report.test_mse_std,
                "val_mse": report.val_mse,
                "nonzero": report.nonzero,
                "lam_max": report.lam_max,
                "best_params": report.best_params,
                "seconds": report.wall_time,
                "n_failed": report.n_failed,
            }
        )
    return dataset_index, records


def benchmark_scenario(
    kind,
    model_kinds,
    p=100,
    n_parents=10,
    reps=1,
    n=560,
    counts=(80, 80, 400),
    noise_sd=5.0,
    seed=0,
    graph_source="estimate",
    mb=MbConfig(),
    grids=None,
    solver=SolverConfig(),
    double_radii=False,
    n_jobs=1,
):
    """Simulate, (optionally) estimate the graph, and tune each model.

    Returns (records, summary): per-dataset-per-model dict records and
    per-model aggregate rows shaped like the reporting table (scenario,
    model, p, mean edges, mean l2, mean MSE, mean seconds).
    """
    if graph_source not in ("true", "estimate"):
        raise ValueError(f"graph_source must be 'true' or 'estimate', got {graph_source!r}")
    grids = grids or {}
    tasks = []
    index = 0
    for parent in range(n_parents):
        for _ in range(reps):
            tasks.append(
                (
                    kind, p, seed, parent, index, n, tuple(counts), noise_sd,
                    tuple(model_kinds), graph_source, mb, grids, solver, double_radii,
                )
            )
            index += 1
    if n_jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            outputs = list(pool.map(_benchmark_task, tasks))
    else:
        outputs = [_benchmark_task(t) for t in tasks]
    outputs.sort(key=lambda pair: pair[0])
    records = [rec for _, recs in outputs for rec in recs]
    summary = summarize(records)
    return records, summary


def summarize(records):
    """Per (scenario, model) means over benchmark records."""
    rows = []
    seen = []
    for rec in records:
        key = (rec["scenario"], rec["model"])
        if key not in seen:
            seen.append(key)
    for scenario, model in seen:
        chunk = [r for r in records if r["scenario"] == scenario and r["model"] == model]
        rows.append(
            {
                "scenario": scenario,
                "model": model,
                "p": chunk[0]["p"],
                "edges": float(np.mean([r["edges"] for r in chunk])),
                "l2_distance": float(np.mean([r["l2_distance"] for r in chunk])),
                "test_mse": float(np.mean([r["test_mse"] for r in chunk])),
                "seconds": float(np.mean([r["seconds"] for r in chunk])),
            }
        )
    return rows
