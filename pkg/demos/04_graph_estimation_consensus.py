"""Estimating the predictor graph from data and building a consensus.

Each node is regressed on all the others with an l1 penalty; nonzero
coefficients propose edges.  Across resampled splits, edges that appear in
strictly more than a threshold count form the consensus graph.
"""

import numpy as np

from graphreg import (
    MbConfig,
    ScenarioSpec,
    SplitScheme,
    consensus,
    make_problem,
    make_splits,
    mb_estimate,
    sample_dataset,
    standardize,
)

prob = make_problem(ScenarioSpec(kind="two_class", p=60, seed=3))
ds = sample_dataset(prob, 400, seed=4)
truth = set(prob.graph.edges())
print(f"true graph: {len(truth)} edges")

print("\nregularization level controls sparsity (whole-dataset estimate)")
whole = standardize(ds, np.arange(ds.n))
for lam in (0.5, 0.3, 0.2):
    est = mb_estimate(whole.X, MbConfig(lam=lam))
    got = set(est.edges())
    print(f"  lam={lam}: {len(got):4d} edges, {len(got & truth):4d} true, {len(got - truth):3d} spurious")

print("\nconsensus across the 90 permutation splits (estimate on each training block)")
splits = make_splits(ds.n, SplitScheme(kind="permutation_segments", segments=10, seed=5))
graphs = []
for split in splits[:30]:  # 30 of the 90 keeps this demo quick
    std = standardize(ds, split.train)
    graphs.append(mb_estimate(std.X[split.train], MbConfig(lam=0.4)))
counts, agreed = consensus(graphs, threshold=len(graphs) * 7 // 9)
hist = {}
for c in counts.counts.values():
    hist[c] = hist.get(c, 0) + 1
print("  edge-count histogram (appearances -> edges):",
      dict(sorted(hist.items(), reverse=True)[:5]))
got = set(agreed.edges())
print(f"  consensus keeps {len(got)} edges; {len(got & truth)} of them are true")
