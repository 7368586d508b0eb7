"""Metrics: recall_k@x, score-alignment diagnostic, projection export."""

from .alignment import alignment_norm
from .predict import prediction_records, read_prediction_file, write_prediction_file
from .projection import ProjectionResult, cluster_stats, export_projection, project_2d
from .recall import PredictionRecord, RecallConfig, default_metric_grid, recall_k_at_x

__all__ = [
    "PredictionRecord",
    "ProjectionResult",
    "RecallConfig",
    "alignment_norm",
    "cluster_stats",
    "default_metric_grid",
    "export_projection",
    "prediction_records",
    "project_2d",
    "read_prediction_file",
    "recall_k_at_x",
    "write_prediction_file",
]
