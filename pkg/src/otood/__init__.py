"""Out-of-distribution scoring via entropic optimal transport.

The package couples the empirical measure of a training set to the
empirical measure of a test batch through a regularized transport
problem with cosine costs, and scores each test input by the Shannon
entropy of its conditional distribution over training points (higher =
more likely out-of-distribution). Distance baselines (k-th neighbor,
Mahalanobis), detection metrics (AUROC / AUPR / FPR@TPR), file formats,
synthetic fixtures, and a CLI round out the toolkit.
"""

from .baselines import (
    GaussianFit,
    knn_score,
    knn_scores,
    mahalanobis_fit,
    mahalanobis_score,
    mahalanobis_scores,
)
from .detectors import KNNDistanceDetector, MahalanobisDetector, TransportEntropyDetector
from .exceptions import (
    ConfigurationError,
    DataError,
    DegenerateInputError,
    FormatError,
    MetricUndefinedError,
    OtoodError,
    SingularityError,
    StabilityError,
)
from .io import (
    read_features,
    read_labels,
    read_scores,
    write_features,
    write_labels,
    write_scores,
)
from .metrics import (
    LabeledScores,
    MetricsReport,
    aupr,
    auroc,
    compute_metrics,
    fpr_at_tpr,
)
from .oracle import brute_force_plan
from .pipeline import RunConfig, run_pipeline, score_features
from .scoring import (
    ConditionalDistribution,
    ScoredBatch,
    SolverDiagnostics,
    column_entropy_scores,
    conditional_distribution,
    conditional_entropy_score,
    joint_entropy,
    mutual_information,
    score_batch,
)
from .synthetic import gen_synthetic
from .transport import (
    EmpiricalMeasure,
    SinkhornConfig,
    TransportPlan,
    cosine_cost_matrix,
    objective_value,
    sinkhorn,
    uniform_measure,
)

__version__ = "0.1.0"

__all__ = [
    "ConditionalDistribution",
    "ConfigurationError",
    "DataError",
    "DegenerateInputError",
    "EmpiricalMeasure",
    "FormatError",
    "GaussianFit",
    "KNNDistanceDetector",
    "LabeledScores",
    "MahalanobisDetector",
    "MetricUndefinedError",
    "MetricsReport",
    "OtoodError",
    "RunConfig",
    "ScoredBatch",
    "SingularityError",
    "SinkhornConfig",
    "SolverDiagnostics",
    "StabilityError",
    "TransportEntropyDetector",
    "TransportPlan",
    "aupr",
    "auroc",
    "brute_force_plan",
    "column_entropy_scores",
    "compute_metrics",
    "conditional_distribution",
    "conditional_entropy_score",
    "cosine_cost_matrix",
    "fpr_at_tpr",
    "gen_synthetic",
    "joint_entropy",
    "knn_score",
    "knn_scores",
    "mahalanobis_fit",
    "mahalanobis_score",
    "mahalanobis_scores",
    "mutual_information",
    "objective_value",
    "read_features",
    "read_labels",
    "read_scores",
    "run_pipeline",
    "score_batch",
    "score_features",
    "sinkhorn",
    "uniform_measure",
    "write_features",
    "write_labels",
    "write_scores",
]
