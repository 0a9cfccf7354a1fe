"""Model families and their translation into projection-ball radii.

Three penalties share one solver:

* ``srig``   - weighted l2 norm per neighborhood (group selection only).
* ``dsrig``  - adds a flat within-group l1 level ``xi``.
* ``sglig``  - one overall level lam (held at lambda_max / c) with an
  ``alpha`` trade-off: alpha * tau_i on the l2 side against
  (1 - alpha) * sqrt(degree_i) on the l1 side.

A penalty weight w at gradient-step size 1/sigma corresponds to a dual ball
of radius w / sigma, so the prox reduces to the projection machinery in
``projections``.  A zero weight means the constraint is absent entirely
(infinite radius), which makes the alpha in {0, 1} and xi = 0 reductions
exact.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .projections import GroupRadii

MODEL_KINDS = ("srig", "dsrig", "sglig")

WEIGHT_FLOOR = 1e-2
WEIGHT_CAP = 1e4


@dataclass(frozen=True)
class ModelSpec:
    """One model family instance: kind, penalty levels, weights, groups."""

    kind: str
    params: dict
    weights: np.ndarray
    groups: list

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        w = np.asarray(self.weights, dtype=np.float64)
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("weights must be finite and positive")
        for name, value in self.params.items():
            if name == "alpha":
                if not 0.0 <= value <= 1.0:
                    raise ValueError(f"alpha must lie in [0, 1], got {value}")
            elif value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")

    @property
    def degrees(self):
        return np.array([g.degree for g in self.groups], dtype=np.float64)


@dataclass(frozen=True)
class TuningGrid:
    """Grid of parameter tuples in decreasing-shrinkage order.

    ``chains`` lists index runs that share warm starts: within a chain the
    entries go from most to least shrinkage.
    """

    kind: str
    entries: tuple
    chains: tuple

    def __len__(self):
        return len(self.entries)


def _clipped_inverse(cov):
    with np.errstate(divide="ignore"):
        raw = np.where(np.abs(cov) > 0, 1.0 / np.abs(cov), np.inf)
    return np.clip(raw, WEIGHT_FLOOR, WEIGHT_CAP)


def srig_weights(X_train, y_train):
    """Per-node weights 1 / |cov(X_i, y)| on the training rows, clipped.

    Covariances use the n-1 denominator; the absolute value keeps weights
    positive, and the [1e-2, 1e4] clip absorbs near-zero covariances.
    """
    X_train = np.asarray(X_train, dtype=np.float64)
    y_train = np.asarray(y_train, dtype=np.float64)
    n = X_train.shape[0]
    cov = (X_train - X_train.mean(axis=0)).T @ (y_train - y_train.mean()) / (n - 1)
    return _clipped_inverse(cov)


def dsrig_weights(X_train, y_train, degrees):
    """Degree-adjusted weights sqrt(d_i) / |cov(X_i, y)|, clipped."""
    X_train = np.asarray(X_train, dtype=np.float64)
    y_train = np.asarray(y_train, dtype=np.float64)
    n = X_train.shape[0]
    cov = (X_train - X_train.mean(axis=0)).T @ (y_train - y_train.mean()) / (n - 1)
    with np.errstate(divide="ignore"):
        raw = np.where(
            np.abs(cov) > 0, np.sqrt(np.asarray(degrees, float)) / np.abs(cov), np.inf
        )
    return np.clip(raw, WEIGHT_FLOOR, WEIGHT_CAP)


def lambda_max(X_train, y_train, groups, weights):
    """Smallest level at which the group-l2 penalty forces beta = 0.

    From the optimality condition at zero: max over groups of
    ||X_{N_i}' y||_2 / (n * tau_i).  The same anchor scales all three model
    grids; the l1 term only adds shrinkage, so beta = 0 is preserved there.
    """
    X_train = np.asarray(X_train, dtype=np.float64)
    y_train = np.asarray(y_train, dtype=np.float64)
    n = X_train.shape[0]
    corr = X_train.T @ y_train
    weights = np.asarray(weights, dtype=np.float64)
    best = 0.0
    for i, g in enumerate(groups):
        norm = float(np.linalg.norm(corr[g.members]))
        best = max(best, norm / (n * weights[i]))
    if best == 0.0:
        warnings.warn("response is identically zero; lambda_max is 0", stacklevel=2)
    return best


def build_grid(
    kind,
    lam_max,
    n_lambda=50,
    n_xi=50,
    n_alpha=50,
    c=5.0,
    xi_max=5.0,
    lambda_min_ratio=0.01,
):
    """Tuning grid for a model kind, anchored at ``lam_max``.

    srig: n_lambda log-spaced levels in [ratio * lam_max, lam_max].
    dsrig: that lambda grid crossed with n_xi equal steps in (0, xi_max]
    (0 itself is excluded; it would duplicate srig).
    sglig: lam fixed at lam_max / c with n_alpha log-spaced trade-offs in
    [ratio, 1].

    Entries are ordered by decreasing shrinkage; chains group the entries
    that warm-start each other.
    """
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    if not lam_max > 0:
        raise ValueError("lam_max must be positive")
    lam_values = np.geomspace(lam_max, lambda_min_ratio * lam_max, n_lambda)
    if kind == "srig":
        entries = tuple({"lam": float(v)} for v in lam_values)
        chains = (tuple(range(len(entries))),)
    elif kind == "dsrig":
        xi_values = np.linspace(xi_max, xi_max / n_xi, n_xi)
        entries = []
        chains = []
        for xi in xi_values:
            start = len(entries)
            entries.extend({"lam": float(v), "xi": float(xi)} for v in lam_values)
            chains.append(tuple(range(start, len(entries))))
        entries = tuple(entries)
        chains = tuple(chains)
    else:
        alpha_values = np.geomspace(1.0, lambda_min_ratio, n_alpha)
        lam_star = float(lam_max / c)
        entries = tuple({"lam": lam_star, "alpha": float(a)} for a in alpha_values)
        chains = (tuple(range(len(entries))),)
    return TuningGrid(kind=kind, entries=entries, chains=chains)


def shrinkage_key(kind, params):
    """Sort key: larger means more shrinkage (used to break MSE ties)."""
    if kind == "srig":
        return (params["lam"],)
    if kind == "dsrig":
        return (params["lam"], params["xi"])
    return (params["lam"], params["alpha"])


def radii_for(spec, sigma, double_radii=False):
    """Projection-ball radii realizing one penalty at step size 1/sigma.

    The per-group l2/linf penalty weights are divided by sigma (the prox is
    taken at step 1/sigma on the 1/n-scaled loss); a zero weight maps to the
    infinite-radius sentinel.  ``double_radii`` additionally doubles every
    radius, matching an alternative conjugate derivation that splits the
    inner product evenly between the two penalty terms; it is off by
    default because the plain mapping is the exact proximal operator (the
    level at which all coefficients vanish then equals lambda_max).
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    weights = np.asarray(spec.weights, dtype=np.float64)
    m = len(spec.groups)
    if weights.shape != (m,):
        raise ValueError("weights must have one entry per group")
    if spec.kind == "srig":
        lam = spec.params["lam"]
        w2 = lam * weights
        winf = np.zeros(m)
    elif spec.kind == "dsrig":
        lam = spec.params["lam"]
        xi = spec.params["xi"]
        w2 = lam * weights
        winf = np.full(m, lam * xi)
    else:
        lam = spec.params["lam"]
        alpha = spec.params["alpha"]
        w2 = lam * alpha * weights
        winf = lam * (1.0 - alpha) * np.sqrt(spec.degrees)
    factor = (2.0 if double_radii else 1.0) / sigma
    l2 = np.where(w2 > 0, factor * w2, np.inf)
    linf = np.where(winf > 0, factor * winf, np.inf)
    return GroupRadii(spec.groups, l2=l2, linf=linf)
