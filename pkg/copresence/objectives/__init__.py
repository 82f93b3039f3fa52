from copresence.objectives.classification_metrics import (
    ClassificationReport,
    classification_suite,
    harmonic_mean,
)
from copresence.objectives.estimation_metrics import (
    ALL_ROW,
    METRIC_COLUMNS,
    EstimationReport,
    aggregate_estimation,
    metric_suite,
    sample_metrics,
    stratum_labels_from_labels,
)
from copresence.objectives.losses import (
    LossReport,
    bce_multilabel,
    kl_gaussians,
    mse_loss,
    regression_loss,
    total_loss,
)
from copresence.objectives.reports import (
    read_json,
    write_classification_report,
    write_estimation_report,
    write_json,
)

__all__ = [
    "ALL_ROW",
    "METRIC_COLUMNS",
    "ClassificationReport",
    "EstimationReport",
    "LossReport",
    "aggregate_estimation",
    "bce_multilabel",
    "classification_suite",
    "harmonic_mean",
    "kl_gaussians",
    "metric_suite",
    "mse_loss",
    "read_json",
    "regression_loss",
    "sample_metrics",
    "stratum_labels_from_labels",
    "total_loss",
    "write_classification_report",
    "write_estimation_report",
    "write_json",
]
