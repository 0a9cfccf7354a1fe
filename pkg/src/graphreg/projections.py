"""Projections onto norm-ball intersections and the induced proximal operator.

The regularizer acts on overlapping coordinate groups (closed neighborhoods
of a predictor graph).  Its proximal operator is evaluated through the
Moreau decomposition: shrink ``h`` by subtracting the Euclidean projection
of ``h`` onto the intersection of per-group l2 balls and linf boxes.  Only
groups whose norms reach their radii participate in the projection; the
remaining groups cannot change it.

Two projection backends are provided:

* ``two_stage_pocs`` (default): cyclic passes over the active groups, each
  pass clipping to the linf box then scaling into the l2 ball.  Converges to
  a feasible point; for overlapping groups it is not guaranteed to be the
  exact Euclidean projection.
* ``dykstra``: averaged projections with Dykstra corrections, one convex set
  per active group, each set projected exactly (1-D dual solve for the
  box/ball intersection).  Converges to the exact projection.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConvergenceError
from .graphs import Neighborhood

_POCS_DEFAULTS = (1e-8, 200)
_DYKSTRA_DEFAULTS = (1e-12, 20_000)


@dataclass(frozen=True)
class ProjectorKind:
    """Projection backend selector with its inner tolerance and budget."""

    kind: str = "two_stage_pocs"
    tol: float = None
    max_iter: int = None

    def __post_init__(self):
        if self.kind not in ("two_stage_pocs", "dykstra"):
            raise ValueError(f"unknown projector kind {self.kind!r}")
        defaults = _POCS_DEFAULTS if self.kind == "two_stage_pocs" else _DYKSTRA_DEFAULTS
        if self.tol is None:
            object.__setattr__(self, "tol", defaults[0])
        if self.max_iter is None:
            object.__setattr__(self, "max_iter", defaults[1])
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")


class GroupRadii:
    """Per-group ball radii defining the projection set.

    ``l2`` and ``linf`` hold one radius per group; ``np.inf`` means the
    corresponding constraint is absent.  Groups may be Neighborhood objects
    or plain index arrays; member indices are kept sorted.
    """

    def __init__(self, groups, l2, linf=None, n_features=None):
        self.groups = list(groups)
        self.members = [
            np.asarray(g.members if isinstance(g, Neighborhood) else g, dtype=np.intp)
            for g in self.groups
        ]
        m = len(self.members)
        self.l2 = np.asarray(l2, dtype=np.float64)
        if linf is None:
            self.linf = np.full(m, np.inf)
        else:
            self.linf = np.asarray(linf, dtype=np.float64)
        if self.l2.shape != (m,) or self.linf.shape != (m,):
            raise ValueError("radius vectors must match the group count")
        if np.any(self.l2 < 0) or np.any(self.linf < 0):
            raise ValueError("radii must be nonnegative")
        for idx in self.members:
            if idx.size == 0:
                raise ValueError("groups must be nonempty")
        if self.members:
            self._flat = np.concatenate(self.members)
            sizes = np.array([len(idx) for idx in self.members])
            self._offsets = np.concatenate(([0], np.cumsum(sizes)[:-1]))
        else:
            self._flat = np.empty(0, dtype=np.intp)
            self._offsets = np.empty(0, dtype=np.intp)
        inferred = int(self._flat.max()) + 1 if self._flat.size else 0
        self.n_features = inferred if n_features is None else int(n_features)
        if self.n_features < inferred:
            raise ValueError("n_features smaller than largest group index")
        self.covered = np.zeros(self.n_features, dtype=bool)
        self.covered[self._flat] = True
        # Pairwise-disjoint groups admit an exact one-pass projection.
        self.all_disjoint = self._flat.size == np.count_nonzero(self.covered)

    @property
    def n_groups(self):
        return len(self.members)

    def group_norms(self, h):
        """(l2, linf) norms of ``h`` restricted to each group."""
        if not self.members:
            return np.empty(0), np.empty(0)
        a = np.abs(h[self._flat])
        n2 = np.sqrt(np.add.reduceat(a * a, self._offsets))
        ninf = np.maximum.reduceat(a, self._offsets)
        return n2, ninf

    def violations(self, x, which):
        """Max constraint violation of ``x`` over the given group indices."""
        worst = 0.0
        for gi in which:
            seg = x[self.members[gi]]
            worst = max(worst, float(np.linalg.norm(seg) - self.l2[gi]))
            worst = max(worst, float(np.max(np.abs(seg)) - self.linf[gi]))
        return max(worst, 0.0)


def project_linf(v, xi):
    """Euclidean projection onto the linf ball of radius ``xi`` (clipping)."""
    if xi < 0:
        raise ValueError("radius must be nonnegative")
    return np.clip(v, -xi, xi)


def project_l2(v, tau):
    """Euclidean projection onto the l2 ball of radius ``tau``."""
    if tau < 0:
        raise ValueError("radius must be nonnegative")
    v = np.asarray(v, dtype=np.float64)
    if np.isinf(tau):
        return v.copy()
    nrm = float(np.linalg.norm(v))
    if nrm <= tau:
        return v.copy()
    if tau == 0.0:
        return np.zeros_like(v)
    return v * (tau / nrm)


def project_group_two_stage(v, tau, xi):
    """Clip to the linf box, then scale into the l2 ball.

    The result is always feasible for both constraints, but for points
    outside both balls it can differ from the exact projection onto the
    intersection.
    """
    return project_l2(project_linf(v, xi), tau)


def project_group_exact(v, tau, xi, _bisect_steps=128):
    """Exact Euclidean projection onto {||.||_2 <= tau} & {||.||_inf <= xi}.

    Stationarity pins the solution to ``clip(v / (1 + mu), xi)`` for a
    multiplier ``mu >= 0`` of the l2 constraint, found by bisection on the
    (monotone) squared-norm gap.
    """
    v = np.asarray(v, dtype=np.float64)
    if np.isinf(xi):
        return project_l2(v, tau)
    w = np.clip(v, -xi, xi)
    if np.isinf(tau) or float(np.linalg.norm(w)) <= tau:
        return w
    if tau == 0.0:
        return np.zeros_like(v)
    lo, hi = 0.0, float(np.linalg.norm(v)) / tau - 1.0
    for _ in range(_bisect_steps):
        mu = 0.5 * (lo + hi)
        cand = np.clip(v / (1.0 + mu), -xi, xi)
        if float(cand @ cand) > tau * tau:
            lo = mu
        else:
            hi = mu
    out = np.clip(v / (1.0 + hi), -xi, xi)
    nrm = float(np.linalg.norm(out))
    if nrm > tau > 0.0:
        out *= tau / nrm
    return out


def _reaches(norms, radii):
    # A norm exactly at a positive radius counts as reaching it; a zero norm
    # at a zero radius does not (nothing there to shrink).
    return (norms > radii) | ((norms == radii) & (radii > 0))


def active_groups(h, radii):
    """Indices of groups whose l2 or linf norm reaches its radius."""
    n2, ninf = radii.group_norms(np.asarray(h, dtype=np.float64))
    hit = _reaches(n2, radii.l2) | _reaches(ninf, radii.linf)
    return np.nonzero(hit)[0]


def project_intersection(h, radii, active, projector=ProjectorKind()):
    """Point of the active groups' constraint-set intersection near ``h``.

    Coordinates covered by no group at all are pinned to zero: the dual set
    of the group regularizer has no mass there, which is what makes the
    Moreau step leave such coordinates untouched.

    Raises ConvergenceError (carrying the last iterate and its constraint
    violation) if the backend exhausts its iteration budget.
    """
    h = np.asarray(h, dtype=np.float64)
    x = h.copy()
    x[~radii.covered[: h.size]] = 0.0
    active = np.asarray(active, dtype=np.intp)
    if active.size == 0:
        return x
    if projector.kind == "two_stage_pocs":
        return _pocs(x, radii, active, projector)
    return _dykstra(x, radii, active, projector)


def _pocs(x, radii, active, projector):
    idx_list = [radii.members[gi] for gi in active]
    tau = radii.l2[active]
    tau_sq = tau * tau
    xi = radii.linf[active]
    disjoint = radii.all_disjoint
    flat = None
    if not disjoint:
        flat = np.concatenate(idx_list)
        if active.size < radii.n_groups:
            hits = np.bincount(flat, minlength=radii.n_features)
            disjoint = int(hits.max()) <= 1
    if disjoint:
        for k, idx in enumerate(idx_list):
            x[idx] = project_group_two_stage(x[idx], tau[k], xi[k])
        return x

    offsets = np.concatenate(([0], np.cumsum([len(i) for i in idx_list])[:-1]))
    scale = 1.0 + float(np.max(np.abs(x)))
    feas_slack = projector.tol * scale
    clip_needed = np.isfinite(xi)
    tau_list = tau_sq.tolist()
    xi_list = xi.tolist()
    clip_list = clip_needed.tolist()
    sqrt = np.sqrt
    for _ in range(projector.max_iter):
        before = x[flat]
        for k, idx in enumerate(idx_list):
            old = x[idx]
            if clip_list[k]:
                xi_k = xi_list[k]
                seg = old.clip(-xi_k, xi_k)
                fresh = True
            else:
                seg = old
                fresh = False
            ssq = float(seg @ seg)
            t2 = tau_list[k]
            if ssq > t2:
                factor = sqrt(t2 / ssq) if t2 > 0.0 else 0.0
                if fresh:
                    seg *= factor
                else:
                    seg = old * factor
            elif not fresh:
                continue
            x[idx] = seg
        moved = x[flat] - before
        if float(np.absolute(moved, out=moved).max()) <= projector.tol:
            a = np.absolute(x[flat])
            n2 = sqrt(np.add.reduceat(a * a, offsets))
            ninf = np.maximum.reduceat(a, offsets)
            if np.all(n2 <= tau + feas_slack) and np.all(ninf <= xi + feas_slack):
                return x
    raise ConvergenceError(
        f"cyclic projection did not settle in {projector.max_iter} cycles",
        estimate=x,
        infeasibility=radii.violations(x, active),
    )


def _dykstra(x, radii, active, projector):
    if active.size == 1 or radii.all_disjoint:
        for gi in active:
            idx = radii.members[gi]
            x[idx] = project_group_exact(x[idx], radii.l2[gi], radii.linf[gi])
        return x
    weight = 1.0 / active.size
    idx_list = [radii.members[gi] for gi in active]
    corrections = [np.zeros(len(idx)) for idx in idx_list]
    flat = np.concatenate(idx_list)
    offsets = np.concatenate(([0], np.cumsum([len(i) for i in idx_list])[:-1]))
    tau = radii.l2[active]
    xi = radii.linf[active]
    # The iterate can stall for stretches while the corrections ratchet up,
    # then move again, so a small step alone does not mean convergence; the
    # limit is feasible, which is what the second test checks (sparsely,
    # since stalls persist across many iterations).
    feas_tol = 1e3 * projector.tol * (1.0 + float(np.max(np.abs(x))))
    next_check = 0
    for it in range(projector.max_iter):
        delta = np.zeros_like(x)
        for k, idx in enumerate(idx_list):
            point = x[idx] + corrections[k]
            proj = project_group_exact(point, tau[k], xi[k])
            corrections[k] = point - proj
            delta[idx] += weight * (proj - x[idx])
        x = x + delta
        if float(np.max(np.abs(delta))) <= projector.tol and it >= next_check:
            a = np.absolute(x[flat])
            n2 = np.sqrt(np.add.reduceat(a * a, offsets))
            ninf = np.maximum.reduceat(a, offsets)
            if np.all(n2 <= tau + feas_tol) and np.all(ninf <= xi + feas_tol):
                return x
            next_check = it + 10
    raise ConvergenceError(
        f"Dykstra iteration did not settle in {projector.max_iter} rounds",
        estimate=x,
        infeasibility=radii.violations(x, active),
    )


def prox_regularizer(h, radii, projector=ProjectorKind()):
    """Proximal step of the doubly sparse group regularizer at ``h``.

    Returns ``(beta, active)`` where ``beta = h - P(h)`` with ``P`` the
    projection onto the active groups' constraint intersection, and
    ``active`` the group indices that participated.  ``beta + P(h) == h``
    holds by construction (to float re-rounding).
    """
    h = np.asarray(h, dtype=np.float64)
    active = active_groups(h, radii)
    projected = project_intersection(h, radii, active, projector)
    return h - projected, active
