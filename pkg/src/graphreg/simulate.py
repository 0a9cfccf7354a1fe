"""Synthetic graph-structured regression problems.

Five graph families drive the precision matrix: two_class, bipartite,
random, blockwise and band.  Each problem is built the same way: sample the
structure matrix B, shift it by delta so that B + delta*I has condition
number p, rescale to unit diagonal, invert for the sampling covariance, and
derive the true coefficients from a sparse cross-covariance vector (four
nodes at value 4 by default).  Everything is bit-deterministic per seed.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateSpectrumError
from .graphs import UndirectedGraph, graph_from_precision
from .linalg import cholesky, extreme_eigs_sym, inv_spd, standard_normal, stream

_TAG_EDGES = 1
_TAG_NODES = 2
_TAG_DESIGN = 3
_TAG_NOISE = 4

SCENARIO_KINDS = ("two_class", "bipartite", "random", "blockwise", "band")


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters of one synthetic graph scenario.

    Defaults reproduce the standard setups: an active first class of 20
    nodes with pair probability 0.1 against 0.05 elsewhere (two_class),
    a 20/80 bipartition at probability 0.1, uniform pairs at 0.05 (random),
    three 10-node blocks at probability 0.5 (blockwise), and a chain with
    diagonal 1.333 and off-diagonal -0.667 (band).  Sampled entries take
    ``edge_value`` (0.5).
    """

    kind: str
    p: int = 100
    seed: int = 0
    edge_value: float = 0.5
    active_size: int = 20
    active_prob: float = 0.1
    inactive_prob: float = 0.05
    random_prob: float = 0.05
    n_blocks: int = 3
    block_size: int = 10
    block_prob: float = 0.5
    band_diag: float = 1.333
    band_offdiag: float = -0.667

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        for name in ("active_prob", "inactive_prob", "random_prob", "block_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if self.p < 1:
            raise ValueError("p must be positive")
        if self.kind in ("two_class", "bipartite") and self.p < self.active_size:
            raise ValueError(
                f"{self.kind} needs p >= {self.active_size}, got {self.p}"
            )
        if self.kind == "blockwise" and self.p < self.n_blocks * self.block_size:
            raise ValueError(
                f"blockwise needs p >= {self.n_blocks * self.block_size}, got {self.p}"
            )


@dataclass
class SyntheticProblem:
    """Ground truth for one simulated regression problem."""

    spec: ScenarioSpec
    B: np.ndarray
    delta: float
    omega: np.ndarray
    sigma: np.ndarray
    graph: UndirectedGraph
    cross_cov: np.ndarray
    beta_true: np.ndarray
    support: np.ndarray


@dataclass
class ColumnScaling:
    """Standardization record fitted on training rows."""

    x_mean: np.ndarray
    x_scale: np.ndarray
    y_mean: float
    y_scale: float
    constant_cols: np.ndarray


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    scaling: ColumnScaling = None

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]


def build_B(spec):
    """Sample the symmetric structure matrix of a scenario.

    The strict upper triangle is sampled and mirrored, which is what gives
    'probability of an edge' its unambiguous meaning.  Only the band
    scenario has a nonzero diagonal.
    """
    gen = stream(spec.seed, _TAG_EDGES)
    p = spec.p
    B = np.zeros((p, p))
    if spec.kind == "band":
        np.fill_diagonal(B, spec.band_diag)
        idx = np.arange(p - 1)
        B[idx, idx + 1] = spec.band_offdiag
        B[idx + 1, idx] = spec.band_offdiag
        return B

    ii, jj = np.triu_indices(p, k=1)
    if spec.kind == "two_class":
        both_inactive = (ii >= spec.active_size) & (jj >= spec.active_size)
        probs = np.where(both_inactive, spec.inactive_prob, spec.active_prob)
    elif spec.kind == "bipartite":
        cross = (ii < spec.active_size) != (jj < spec.active_size)
        probs = np.where(cross, spec.active_prob, 0.0)
    elif spec.kind == "random":
        probs = np.full(ii.shape, spec.random_prob)
    else:  # blockwise
        block_i = ii // spec.block_size
        block_j = jj // spec.block_size
        within = (block_i == block_j) & (jj < spec.n_blocks * spec.block_size)
        probs = np.where(within, spec.block_prob, 0.0)
    draw = gen.random(ii.shape[0])
    vals = np.where(draw < probs, spec.edge_value, 0.0)
    B[ii, jj] = vals
    B[jj, ii] = vals
    return B


def delta_for_condition(B, target_cond, tol=1e-12, seed=0):
    """Shift making cond(B + delta*I) equal ``target_cond``.

    Closed form from the extreme eigenvalues:
    delta = (lam_max - target * lam_min) / (target - 1).
    """
    if not target_cond > 1:
        raise ValueError("target condition number must exceed 1")
    lam_min, lam_max = extreme_eigs_sym(B, tol=tol, seed=seed)
    spread = lam_max - lam_min
    if spread <= 1e-12 * max(1.0, abs(lam_max)):
        raise DegenerateSpectrumError(
            f"spectrum is a point ({lam_min:.6g}); condition number is already 1"
        )
    return (lam_max - target_cond * lam_min) / (target_cond - 1.0)


def standardize_unit_diagonal(omega_raw):
    """Symmetric rescaling D^-1/2 Omega D^-1/2 to a unit diagonal."""
    omega_raw = np.asarray(omega_raw, dtype=np.float64)
    diag = np.diag(omega_raw)
    if np.any(diag <= 0):
        bad = int(np.argmin(diag))
        raise ValueError(f"diagonal entry {bad} is not positive: {diag[bad]:.6g}")
    inv_sqrt = 1.0 / np.sqrt(diag)
    return omega_raw * np.outer(inv_sqrt, inv_sqrt)


def make_problem(spec, n_signal=4, c_value=4.0):
    """Full synthetic problem for a scenario.

    Chains structure sampling, condition calibration (target = p), unit
    diagonal rescaling, graph extraction, and the sparse cross-covariance
    that defines the true coefficients beta = Omega @ cross_cov.
    """
    B = build_B(spec)
    delta = delta_for_condition(B, float(spec.p), seed=spec.seed)
    omega = standardize_unit_diagonal(B + delta * np.eye(spec.p))
    sigma = inv_spd(omega)
    sigma = 0.5 * (sigma + sigma.T)
    graph = graph_from_precision(omega, tol=1e-10)
    gen = stream(spec.seed, _TAG_NODES)
    nodes = np.sort(gen.choice(spec.p, size=n_signal, replace=False))
    cross_cov = np.zeros(spec.p)
    cross_cov[nodes] = c_value
    beta_true = omega @ cross_cov
    support = np.nonzero(np.abs(beta_true) > 1e-12)[0]
    return SyntheticProblem(
        spec=spec,
        B=B,
        delta=float(delta),
        omega=omega,
        sigma=sigma,
        graph=graph,
        cross_cov=cross_cov,
        beta_true=beta_true,
        support=support,
    )


def sample_dataset(problem, n, noise_sd=5.0, seed=0):
    """Draw n rows of the design and the Gaussian response.

    Rows of X are MVN(0, Sigma) via X = Z @ L' with Sigma = L L';
    y = X beta + noise.  Deterministic per seed.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    L = cholesky(problem.sigma)
    Z = standard_normal(stream(seed, _TAG_DESIGN), (n, problem.spec.p))
    X = Z @ L.T
    eps = noise_sd * standard_normal(stream(seed, _TAG_NOISE), n)
    y = X @ problem.beta_true + eps
    return Dataset(X=X, y=y)


def standardize(dataset, train_rows):
    """Center and scale all rows using statistics fit on the training rows.

    Columns whose training standard deviation falls below 1e-12 are flagged
    constant and only centered.  The response is treated the same way as a
    column.  Returns a new Dataset carrying the fitted ColumnScaling.
    """
    train_rows = np.asarray(train_rows, dtype=np.intp)
    if train_rows.size < 2:
        raise ValueError("need at least two training rows to standardize")
    Xt = dataset.X[train_rows]
    yt = dataset.y[train_rows]
    x_mean = Xt.mean(axis=0)
    x_sd = Xt.std(axis=0, ddof=1)
    constant = np.nonzero(x_sd < 1e-12)[0]
    x_scale = np.where(x_sd < 1e-12, 1.0, x_sd)
    y_mean = float(yt.mean())
    y_sd = float(yt.std(ddof=1))
    y_scale = 1.0 if y_sd < 1e-12 else y_sd
    scaling = ColumnScaling(
        x_mean=x_mean,
        x_scale=x_scale,
        y_mean=y_mean,
        y_scale=y_scale,
        constant_cols=constant,
    )
    X = (dataset.X - x_mean) / x_scale
    y = (dataset.y - y_mean) / y_scale
    return Dataset(X=X, y=y, scaling=scaling)
