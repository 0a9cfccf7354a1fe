"""Graph estimation by per-node lasso regressions, plus consensus tallies.

Each predictor is regressed on all the others with an l1 penalty under the
(1/2n) loss convention; nonzero coefficients propose edges, merged across
the two regression directions by an or- or and-rule.  Consensus aggregation
counts how often each edge appears across a family of estimated graphs and
keeps the edges seen strictly more often than a threshold.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError
from .graphs import UndirectedGraph


@dataclass(frozen=True)
class MbConfig:
    lam: float = 0.5
    rule: str = "or_rule"
    cd_tol: float = 1e-7
    cd_max_sweeps: int = 1000

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.rule not in ("or_rule", "and_rule"):
            raise ValueError(f"unknown symmetrization rule {self.rule!r}")


@dataclass
class EdgeCounts:
    """Occurrence counts per unordered node pair across estimated graphs."""

    p: int
    counts: dict
    total: int


def soft_threshold(z, gamma):
    return np.sign(z) * np.maximum(np.abs(z) - gamma, 0.0)


def lasso_objective(A, b, lam, w):
    r = b - A @ w
    return float(r @ r) / (2.0 * A.shape[0]) + lam * float(np.sum(np.abs(w)))


def lasso_cd(A, b, lam, tol=1e-7, max_sweeps=1000):
    """Cyclic coordinate descent for (1/2n)||b - A w||^2 + lam ||w||_1.

    Column j updates to S(z_j, lam) / (||A_j||^2 / n) with z_j the partial
    residual correlation.  Stops when the largest coordinate change in a
    sweep falls below ``tol``; raises ConvergenceError otherwise.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n, q = A.shape
    col_scale = np.einsum("ij,ij->j", A, A) / n
    w = np.zeros(q)
    resid = b.copy()
    for _ in range(max_sweeps):
        biggest = 0.0
        for j in range(q):
            if col_scale[j] == 0.0:
                continue
            old = w[j]
            z = (A[:, j] @ resid) / n + col_scale[j] * old
            new = soft_threshold(z, lam) / col_scale[j]
            if new != old:
                resid -= (new - old) * A[:, j]
                w[j] = new
                biggest = max(biggest, abs(new - old))
        if biggest < tol:
            return w
    raise ConvergenceError(
        f"coordinate descent did not converge in {max_sweeps} sweeps", estimate=w
    )


def mb_estimate(X, config=MbConfig()):
    """Estimate the predictor graph by neighborhood selection.

    Expects standardized columns.  For each node j, the lasso of X_j on the
    remaining columns proposes the neighbors of j; the or-rule keeps an edge
    proposed by either endpoint, the and-rule requires both.
    """
    X = np.asarray(X, dtype=np.float64)
    p = X.shape[1]
    proposed = np.zeros((p, p), dtype=bool)
    others = np.arange(p)
    for j in range(p):
        cols = np.delete(others, j)
        try:
            w = lasso_cd(
                X[:, cols], X[:, j], config.lam,
                tol=config.cd_tol, max_sweeps=config.cd_max_sweeps,
            )
        except ConvergenceError as err:
            raise ConvergenceError(
                f"neighborhood regression for node {j} failed: {err}",
                estimate=err.estimate,
            ) from err
        proposed[j, cols[w != 0]] = True
    keep = (proposed | proposed.T) if config.rule == "or_rule" else (proposed & proposed.T)
    ii, jj = np.nonzero(np.triu(keep, k=1))
    return UndirectedGraph(p, edges=zip(ii.tolist(), jj.tolist()))


def consensus(graphs, threshold):
    """Edge tallies across graphs and the strict-majority consensus graph.

    An edge enters the consensus iff its count is strictly greater than
    ``threshold``.
    """
    graphs = list(graphs)
    if not graphs:
        raise ValueError("need at least one graph")
    p = graphs[0].p
    for g in graphs:
        if g.p != p:
            raise ValueError(f"node count mismatch: {g.p} vs {p}")
    if threshold > len(graphs):
        raise ValueError("threshold exceeds the number of graphs")
    counts = {}
    for g in graphs:
        for edge in g.edges():
            counts[edge] = counts.get(edge, 0) + 1
    kept = [e for e, c in sorted(counts.items()) if c > threshold]
    return (
        EdgeCounts(p=p, counts=dict(sorted(counts.items())), total=len(graphs)),
        UndirectedGraph(p, edges=kept),
    )
