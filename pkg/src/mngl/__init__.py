"""Multi-state sparse Gaussian network discovery.

Jointly estimates cluster structure (nodes) and sparse inverse-covariance
structure (edges) for a mixture of latent network states from raw
multivariate observations, with single-state and pipeline baselines and a
ground-truth synthetic benchmark harness.
"""

from .baselines import PipelineResult, kmeans, pipeline_cgl, pipeline_onmtf
from .cgl import CglSolution, cgl_objective, cgl_solve, h_update
from .core import (
    component_log_densities,
    empirical_covariance,
    mixture_nll,
    project,
    weighted_data,
)
from .em import (
    MnglConfig,
    MnglResult,
    e_step,
    initialize,
    m_step_networks,
    m_step_phi,
    mngl_fit,
)
from .glasso import (
    GlassoProblem,
    GlassoSolution,
    edge_set,
    glasso_objective,
    glasso_solve,
    matrix_edges,
)
from .metrics import (
    ClusterScore,
    ComponentScore,
    EdgeScore,
    ScoreReport,
    align_components,
    edge_score,
    nmi,
    purity,
    score_run,
)
from .onmtf import OnmtfSolution, cluster_assign, onmtf_solve
from .synthetic import (
    GroundTruth,
    ScenarioSpec,
    generate_truth,
    sample,
    scenario_instances,
)
from .types import (
    ClusterIndicator,
    DataMatrix,
    EmpiricalCovariance,
    MixtureComponent,
    MixtureState,
    NodePrecision,
    ResponsibilityMatrix,
    SolverSettings,
)

__version__ = "0.1.0"
