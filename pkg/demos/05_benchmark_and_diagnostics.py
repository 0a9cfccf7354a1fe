"""A miniature end-to-end benchmark plus the finite-sample error diagnostic.

The full protocol simulates datasets from parent graphs, splits them into
train/validation/test blocks, tunes every model on its grid, and averages
the metrics.  This demo runs a reduced version (smaller p, fewer datasets)
and then evaluates the theoretical error bound next to the observed error;
the bound is a sanity diagnostic, not a certification.
"""

import numpy as np

from graphreg import (
    ScenarioSpec,
    SolverConfig,
    SplitScheme,
    benchmark_scenario,
    estimation_error_bound,
    make_problem,
    make_splits,
    sample_dataset,
    srig_weights,
    standardize,
    tune,
)
from graphreg.evaluate import group_operator_norm_max, restricted_curvature
from graphreg.graphs import neighborhoods

print("mini benchmark: two_class, p = 40, 3 datasets, true graph")
records, summary = benchmark_scenario(
    "two_class", ["srig", "sglig"], p=40, n_parents=3, reps=1,
    n=280, counts=(60, 60, 160), seed=0, graph_source="true",
    solver=SolverConfig(max_iter=300), n_jobs=1,
)
print(f"{'model':8s}{'l2':>8s}{'mse':>9s}{'sec':>7s}")
for row in summary:
    print(f"{row['model']:8s}{row['l2_distance']:8.2f}{row['test_mse']:9.2f}{row['seconds']:7.1f}")

print("\nerror-bound diagnostic on one fitted dataset")
prob = make_problem(ScenarioSpec(kind="two_class", p=40, seed=0))
ds = sample_dataset(prob, 280, seed=10)
(split,) = make_splits(280, SplitScheme(kind="fixed_counts", n_train=60, n_val=60, n_test=160, seed=0))
report = tune(ds, prob.graph, "sglig", split, solver=SolverConfig(max_iter=300),
              beta_true=prob.beta_true)

std = standardize(ds, split.train)
X = std.X[split.train]
groups = neighborhoods(prob.graph)
degrees = np.array([g.degree for g in groups], dtype=float)
weights = srig_weights(X, std.y[split.train])
bound = estimation_error_bound(
    noise_sd=5.0,
    group_opnorm_max=group_operator_norm_max(X, groups),
    d_min=float(degrees.min()),
    d_max=float(degrees.max()),
    # the weight bound enters through the nonzero latent components only
    weight_max=float(weights[prob.support].max()),
    n_active=float(len(prob.support)),
    p=40,
    n=len(split.train),
    curvature=max(restricted_curvature(X, prob.support), 1e-6),
)
observed = report.l2_distance**2
print(f"  observed ||beta_hat - beta||^2 = {observed:9.2f}")
print(f"  theoretical bound              = {bound:9.2f}")
print("  (reported side by side only; constants make the bound loose)")
