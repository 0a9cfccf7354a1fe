"""Exception types shared across the package."""


class GraphregError(Exception):
    """Base class for package-specific failures."""


class ConvergenceError(GraphregError):
    """An iterative routine did not reach its tolerance within its budget.

    Carries the last iterate (``estimate``) and, where meaningful, a
    feasibility gap (``infeasibility``) so callers can inspect or salvage
    the partial result.
    """

    def __init__(self, message, estimate=None, infeasibility=None):
        super().__init__(message)
        self.estimate = estimate
        self.infeasibility = infeasibility


class NotPositiveDefiniteError(GraphregError):
    """A matrix required to be positive definite failed a pivot test."""

    def __init__(self, pivot, value):
        super().__init__(
            f"matrix is not positive definite: pivot {pivot} = {value:.6g}"
        )
        self.pivot = pivot
        self.value = value


class DegenerateSpectrumError(GraphregError):
    """All eigenvalues coincide, so no shift can reach the target condition."""


class DivergenceError(GraphregError):
    """Solver iterates became non-finite."""

    def __init__(self, iteration):
        super().__init__(f"non-finite iterate at iteration {iteration}")
        self.iteration = iteration
