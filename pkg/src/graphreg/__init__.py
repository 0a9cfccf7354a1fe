"""Graph-structured sparse regression with doubly projected proximal solvers.

A regression coefficient vector over predictors that form a Gaussian
graphical model can be decomposed into per-node latent contributions
supported on graph neighborhoods.  This package penalizes those latent
contributions (group l2, within-group l1, or a single trade-off between
the two), solves the resulting problems with an accelerated proximal
method whose prox is a projection onto an intersection of norm balls, and
ships the synthetic generators, graph estimation, and tuning harness used
to benchmark the model family.
"""

from .evaluate import (
    SplitScheme,
    TuningReport,
    benchmark_scenario,
    estimation_error_bound,
    make_splits,
    metrics,
    summarize,
    tune,
)
from .exceptions import (
    ConvergenceError,
    DegenerateSpectrumError,
    DivergenceError,
    GraphregError,
    NotPositiveDefiniteError,
)
from .graph_select import EdgeCounts, MbConfig, consensus, lasso_cd, mb_estimate
from .graphs import (
    Neighborhood,
    UndirectedGraph,
    degrees,
    graph_from_precision,
    neighborhood,
    neighborhoods,
)
from .linalg import (
    SpectralEstimate,
    cholesky,
    extreme_eigs_sym,
    solve_spd,
    spectral_norm_sym,
)
from .models import (
    ModelSpec,
    TuningGrid,
    build_grid,
    dsrig_weights,
    lambda_max,
    radii_for,
    srig_weights,
)
from .projections import (
    GroupRadii,
    ProjectorKind,
    active_groups,
    project_group_exact,
    project_group_two_stage,
    project_intersection,
    project_l2,
    project_linf,
    prox_regularizer,
)
from .simulate import (
    Dataset,
    ScenarioSpec,
    SyntheticProblem,
    build_B,
    delta_for_condition,
    make_problem,
    sample_dataset,
    standardize,
    standardize_unit_diagonal,
)
from .solver import FitResult, SolverConfig, fit, loss, step_constant

__version__ = "0.1.0"
