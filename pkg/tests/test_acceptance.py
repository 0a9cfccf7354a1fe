"""End-to-end acceptance checks.

Each test prints one PASS/FAIL line (visible with ``pytest -s`` or in the
verbose report).  The two benchmark fixtures dominate the runtime; the
solver iteration budget is capped at 300 because on p > n problems the
momentum iterates keep oscillating below the loss plateau long after the
reported metrics have stabilized (selections and metrics were verified
identical against a 1000-iteration budget).
"""

import os

import numpy as np
import pytest
from scipy.optimize import NonlinearConstraint, minimize

from graphreg.evaluate import benchmark_scenario
from graphreg.graph_select import MbConfig, mb_estimate
from graphreg.graphs import UndirectedGraph, neighborhoods
from graphreg.linalg import cholesky, solve_spd, standard_normal, stream
from graphreg.models import ModelSpec, lambda_max, radii_for, srig_weights
from graphreg.projections import (
    GroupRadii,
    ProjectorKind,
    active_groups,
    project_group_two_stage,
    project_intersection,
    prox_regularizer,
)
from graphreg.simulate import ScenarioSpec, make_problem, sample_dataset
from graphreg.solver import SolverConfig, fit, step_constant

BENCH_SOLVER = SolverConfig(max_iter=300)
N_JOBS = min(6, os.cpu_count() or 1)
DYKSTRA = ProjectorKind("dykstra")


def _report(name, ok, detail):
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")


@pytest.fixture(scope="module")
def two_class_benchmark():
    _, summary = benchmark_scenario(
        "two_class",
        ["srig", "sglig", "dsrig"],
        p=100,
        n_parents=10,
        reps=1,
        n=560,
        counts=(80, 80, 400),
        noise_sd=5.0,
        seed=0,
        graph_source="true",
        grids={"dsrig": {"n_lambda": 20, "n_xi": 20}},
        solver=BENCH_SOLVER,
        n_jobs=N_JOBS,
    )
    return {row["model"]: row for row in summary}


@pytest.fixture(scope="module")
def scaling_benchmarks():
    out = {}
    for p in (100, 200):
        _, summary = benchmark_scenario(
            "two_class",
            ["srig", "sglig"],
            p=p,
            n_parents=5,
            reps=1,
            n=560,
            counts=(80, 80, 400),
            noise_sd=5.0,
            seed=0,
            graph_source="true",
            solver=BENCH_SOLVER,
            n_jobs=N_JOBS,
        )
        out[p] = {row["model"]: row for row in summary}
    return out


def test_criterion_1_table_ordering(two_class_benchmark):
    rows = two_class_benchmark
    mse = {m: rows[m]["test_mse"] for m in rows}
    l2_sglig = rows["sglig"]["l2_distance"]
    ok_order = mse["dsrig"] <= mse["sglig"] <= mse["srig"] + 0.3
    ok_l2 = 0.7 * 5.36 <= l2_sglig <= 1.3 * 5.36
    _report(
        "1 table-ordering",
        ok_order and ok_l2,
        f"mse dsrig={mse['dsrig']:.2f} sglig={mse['sglig']:.2f} srig={mse['srig']:.2f}, "
        f"sglig l2={l2_sglig:.2f} target 5.36 +/-30%",
    )
    assert mse["dsrig"] <= mse["sglig"]
    assert mse["sglig"] <= mse["srig"] + 0.3
    assert 0.7 * 5.36 <= l2_sglig <= 1.3 * 5.36


def test_criterion_2_timing_separation(two_class_benchmark):
    rows = two_class_benchmark
    sec = {m: rows[m]["seconds"] for m in rows}
    slow_ratio = sec["dsrig"] / sec["sglig"]
    fast_ratio = sec["sglig"] / sec["srig"]
    ok = slow_ratio >= 5.0 and fast_ratio <= 5.0
    _report(
        "2 timing-separation",
        ok,
        f"dsrig/sglig={slow_ratio:.1f} (>=5), sglig/srig={fast_ratio:.1f} (<=5)",
    )
    assert slow_ratio >= 5.0
    assert fast_ratio <= 5.0


def test_criterion_3_scaling_trend(scaling_benchmarks):
    ok = True
    details = []
    for p, rows in scaling_benchmarks.items():
        sg, sr = rows["sglig"]["l2_distance"], rows["srig"]["l2_distance"]
        details.append(f"p={p}: sglig {sg:.2f} <= srig {sr:.2f}")
        ok = ok and sg <= sr
    _report("3 scaling-trend", ok, "; ".join(details))
    for p, rows in scaling_benchmarks.items():
        assert rows["sglig"]["l2_distance"] <= rows["srig"]["l2_distance"]


def _oracle_projection(h, radii, active):
    """Brute-force projection: multi-start grid refinement plus polish.

    Coordinates outside every active group are unconstrained, so their
    optimum is h itself; the search runs over the remaining coordinates.
    """
    p = len(h)
    if len(active) == 0:
        out = h.copy()
        out[~radii.covered[:p]] = 0.0
        return out
    free = np.unique(np.concatenate([radii.members[gi] for gi in active]))
    d = len(free)

    def feasible(points, slack=1e-12):
        ok = np.ones(len(points), dtype=bool)
        for gi in active:
            cols = np.searchsorted(free, radii.members[gi])
            seg = points[:, cols]
            ok &= np.linalg.norm(seg, axis=1) <= radii.l2[gi] + slack
            ok &= np.max(np.abs(seg), axis=1) <= radii.linf[gi] + slack
        return ok

    target = h[free]
    width = float(np.max(np.abs(target))) + 0.5
    axes = [np.linspace(-width, width, 41)] * d
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    mesh = mesh[feasible(mesh)]
    dists = np.linalg.norm(mesh - target, axis=1)
    best = mesh[int(np.argmin(dists))]
    best_dist = float(np.min(dists))

    # KKT stage: solve the projection program from the grid seed with an
    # independent constrained optimizer; per-coordinate boxes collapse to
    # the tightest linf radius over the active groups containing it.
    box = np.full(d, np.inf)
    cons = []
    for gi in active:
        cols = np.searchsorted(free, radii.members[gi])
        if np.isfinite(radii.linf[gi]):
            box[cols] = np.minimum(box[cols], radii.linf[gi])
        if np.isfinite(radii.l2[gi]):
            r = float(radii.l2[gi])
            cons.append(
                NonlinearConstraint(
                    lambda x, c=cols: float(x[c] @ x[c]), -np.inf, r * r
                )
            )
    bounds = [(-b, b) if np.isfinite(b) else (None, None) for b in box]
    res = minimize(
        lambda x: 0.5 * float((x - target) @ (x - target)),
        best,
        method="SLSQP",
        constraints=cons,
        bounds=bounds,
        options={"maxiter": 400, "ftol": 1e-16},
    )
    cand = np.asarray(res.x, dtype=np.float64)
    if feasible(cand[None, :], slack=1e-8)[0] and np.linalg.norm(cand - target) <= best_dist + 1e-9:
        best = cand
    out = h.copy()
    out[~radii.covered[: len(h)]] = 0.0
    out[free] = best
    return out


def test_criterion_4_projection_exactness():
    # documented single-group case
    radii = GroupRadii([np.array([0, 1])], l2=[0.7], linf=[0.6], n_features=2)
    h = np.array([2.0, 0.5])
    act = active_groups(h, radii)
    got = project_intersection(h, radii, act, DYKSTRA)
    np.testing.assert_allclose(got, [0.6, np.sqrt(0.13)], atol=1e-6)
    two_stage = project_group_two_stage(h, 0.7, 0.6)
    np.testing.assert_allclose(two_stage, [0.5377549, 0.4481291], atol=1e-6)

    gen = np.random.default_rng(42)
    worst = 0.0
    for _ in range(50):
        p = int(gen.integers(2, 4))
        m = int(gen.integers(1, 3))
        groups = []
        for _ in range(m):
            size = int(gen.integers(2, p + 1))
            groups.append(np.sort(gen.choice(p, size=size, replace=False)))
        l2 = gen.random(m) * 1.2 + 0.3
        linf = gen.random(m) * 0.8 + 0.2
        radii = GroupRadii(groups, l2=l2, linf=linf, n_features=p)
        h = gen.standard_normal(p) * 2.0
        act = active_groups(h, radii)
        got = project_intersection(h, radii, act, DYKSTRA)
        oracle = _oracle_projection(h, radii, act)
        worst = max(worst, float(np.max(np.abs(got - oracle))))
    ok = worst <= 1e-4
    _report("4 projection-exactness", ok, f"max |dykstra - oracle| = {worst:.2e} (<= 1e-4)")
    assert ok


def test_criterion_5_active_set_equivalence():
    gen = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        p = int(gen.integers(4, 13))
        m = int(gen.integers(2, 6))
        groups = [
            np.sort(gen.choice(p, size=int(gen.integers(2, p)), replace=False))
            for _ in range(m)
        ]
        l2 = gen.random(m) * 2 + 0.2
        linf = np.where(gen.random(m) < 0.3, np.inf, gen.random(m) + 0.2)
        radii = GroupRadii(groups, l2=l2, linf=linf, n_features=p)
        h = gen.standard_normal(p) * 1.5
        full = project_intersection(h, radii, np.arange(m), DYKSTRA)
        act = active_groups(h, radii)
        restricted = project_intersection(h, radii, act, DYKSTRA)
        worst = max(worst, float(np.max(np.abs(full - restricted))))
    ok = worst <= 1e-8
    _report("5 active-set-equivalence", ok, f"max difference = {worst:.2e} (<= 1e-8)")
    assert ok


def test_criterion_6_prox_oracle():
    gen = np.random.default_rng(11)
    worst = 0.0
    for trial in range(100):
        d = int(gen.integers(1, 7))
        h = gen.standard_normal(d) * 3.0
        if trial % 5 == 0:
            # within-group-only penalty: coordinatewise 1-D minimization
            xi = float(gen.random() * 1.5 + 0.05)
            radii = GroupRadii([np.arange(d)], l2=[np.inf], linf=[xi], n_features=d)
            beta, _ = prox_regularizer(h, radii, DYKSTRA)
            grid = np.linspace(-1.2 * np.max(np.abs(h)) - 1, 1.2 * np.max(np.abs(h)) + 1, 200_001)
            oracle = np.empty(d)
            for j in range(d):
                vals = 0.5 * (grid - h[j]) ** 2 + xi * np.abs(grid)
                oracle[j] = grid[np.argmin(vals)]
        else:
            # group-level penalty: 1-D search along the ray through h
            tau = float(gen.random() * 2 + 0.05)
            radii = GroupRadii([np.arange(d)], l2=[tau], n_features=d)
            beta, _ = prox_regularizer(h, radii, DYKSTRA)
            hn = float(np.linalg.norm(h))
            cs = np.linspace(0.0, 1.0, 500_001)
            vals = 0.5 * (cs - 1.0) ** 2 * hn * hn + tau * cs * hn
            oracle = cs[np.argmin(vals)] * h
        worst = max(worst, float(np.max(np.abs(beta - oracle))))
    ok = worst <= 1e-3
    _report("6 prox-oracle", ok, f"max |prox - line-search oracle| = {worst:.2e} (<= 1e-3)")
    assert ok


def test_criterion_7_zero_penalty_equivalence():
    worst = 0.0
    for seed in range(20):
        gen = stream(seed, 0)
        X = standard_normal(gen, (200, 20))
        beta = standard_normal(gen, 20)
        y = X @ beta + 0.5 * standard_normal(gen, 200)
        radii = GroupRadii([np.array([i]) for i in range(20)], l2=np.zeros(20), n_features=20)
        res = fit(X, y, radii)
        ols = solve_spd(X.T @ X, X.T @ y)
        worst = max(worst, float(np.linalg.norm(res.beta - ols) / np.linalg.norm(ols)))
    ok = worst <= 1e-4
    _report("7 zero-penalty", ok, f"max relative gap to normal equations = {worst:.2e} (<= 1e-4)")
    assert ok


def _chain_problem(seed, p=15, n=90):
    gen = stream(seed, 1)
    X = standard_normal(gen, (n, p))
    beta = np.zeros(p)
    beta[:4] = [2.0, -1.5, 1.0, 0.5]
    y = X @ beta + 0.5 * standard_normal(gen, n)
    graph = UndirectedGraph(p, edges=[(i, i + 1) for i in range(p - 1)])
    return X, y, neighborhoods(graph)


def test_criterion_8_reduction_identities():
    ok = True
    for seed in range(10):
        X, y, groups = _chain_problem(seed)
        w = srig_weights(X, y)
        sigma = step_constant(X)
        lam = 0.35 * lambda_max(X, y, groups, w)
        base = fit(X, y, radii_for(ModelSpec("srig", {"lam": lam}, w, groups), sigma), sigma=sigma)
        via_sglig = fit(
            X, y,
            radii_for(ModelSpec("sglig", {"lam": lam, "alpha": 1.0}, w, groups), sigma),
            sigma=sigma,
        )
        via_dsrig = fit(
            X, y,
            radii_for(ModelSpec("dsrig", {"lam": lam, "xi": 0.0}, w, groups), sigma),
            sigma=sigma,
        )
        ok = ok and np.array_equal(base.beta, via_sglig.beta)
        ok = ok and np.array_equal(base.beta, via_dsrig.beta)
    _report("8 reduction-identities", ok, "sglig(alpha=1) and dsrig(xi=0) bitwise equal srig, 10 problems")
    assert ok


def test_criterion_9_lambda_max_bracketing():
    ok = True
    for seed in range(20):
        X, y, groups = _chain_problem(seed + 100, p=12, n=100)
        w = srig_weights(X, y)
        sigma = step_constant(X)
        anchor = lambda_max(X, y, groups, w)
        above = fit(
            X, y,
            radii_for(ModelSpec("srig", {"lam": 1.01 * anchor}, w, groups), sigma),
            sigma=sigma,
        )
        below = fit(
            X, y,
            radii_for(ModelSpec("srig", {"lam": 0.5 * anchor}, w, groups), sigma),
            sigma=sigma,
        )
        ok = ok and np.all(above.beta == 0) and np.any(below.beta != 0)
    _report("9 lambda-max-bracketing", ok, "beta=0 at 1.01*lam_max, beta!=0 at 0.5*lam_max, 20 problems")
    assert ok


SCENARIOS = ("two_class", "bipartite", "random", "blockwise", "band")


def test_criterion_10_generator_invariants():
    ok = True
    for kind in SCENARIOS:
        for seed in range(10):
            prob = make_problem(ScenarioSpec(kind=kind, p=100, seed=seed))
            evals = np.linalg.eigvalsh(prob.omega)
            ok = ok and evals[0] > 0
            ok = ok and np.allclose(np.diag(prob.omega), 1.0, atol=1e-12)
            shifted = np.linalg.eigvalsh(prob.B + prob.delta * np.eye(100))
            cond = shifted[-1] / shifted[0]
            ok = ok and 99.0 <= cond <= 101.0
            if kind == "bipartite":
                for i, j in prob.graph.edges():
                    ok = ok and (i < 20) != (j < 20)
            if kind == "blockwise":
                for i, j in prob.graph.edges():
                    ok = ok and i // 10 == j // 10 and j < 30
                ok = ok and all(len(prob.graph.neighbors(k)) == 0 for k in range(30, 100))
    _report("10 generator-invariants", ok, "SPD, unit diagonal, cond in [0.99p, 1.01p], structure exact")
    assert ok


def test_criterion_10_band_correlation_decay():
    prob = make_problem(ScenarioSpec(kind="band", p=100, seed=0))
    ds = sample_dataset(prob, 5000, seed=1)
    corr = np.corrcoef(ds.X, rowvar=False)
    lags = []
    for lag in (1, 2, 3, 4):
        vals = [corr[i, i + lag] for i in range(100 - lag)]
        lags.append(float(np.mean(vals)))
    monotone = all(a > b for a, b in zip(lags, lags[1:]))
    _report("10 band-decay", monotone, f"mean correlations by lag: {[round(v, 3) for v in lags]}")
    assert monotone


def test_criterion_10_band_neighbor_correlation_window():
    # Calibrating cond(B + delta*I) = p fixes delta near 0.0273 for the band
    # structure, which pins the neighbor correlation near 0.82; the target
    # window below (a stand-in for a 0.5^|i-j| decay) cannot coexist with
    # the condition-number requirement checked above.  Kept as specified.
    prob = make_problem(ScenarioSpec(kind="band", p=100, seed=0))
    ds = sample_dataset(prob, 5000, seed=1)
    corr = np.corrcoef(ds.X, rowvar=False)
    lag1 = np.array([corr[i, i + 1] for i in range(99)])
    mean_lag1 = float(np.mean(lag1))
    ok = 0.35 <= mean_lag1 <= 0.65
    _report("10 band-corr-window", ok, f"mean neighbor correlation = {mean_lag1:.3f}, window [0.35, 0.65]")
    assert ok


def test_criterion_11_mb_chain_recovery():
    rho = 0.8
    omega = np.array(
        [
            [1.0, -rho, 0.0],
            [-rho, 1.0 + rho * rho, -rho],
            [0.0, -rho, 1.0],
        ]
    ) / (1.0 - rho * rho)
    sigma = np.linalg.inv(omega)
    L = cholesky(sigma)
    Z = standard_normal(stream(0, 3), (2000, 3))
    X = Z @ L.T
    X = (X - X.mean(0)) / X.std(0, ddof=1)
    got = mb_estimate(X, MbConfig(lam=0.5, rule="or_rule"))
    ok = got.edges() == [(0, 1), (1, 2)]
    _report("11 mb-chain-recovery", ok, f"estimated edges {got.edges()}, truth [(0,1),(1,2)]")
    assert ok
