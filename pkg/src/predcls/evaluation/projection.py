"""2-D projection of conditioning vectors with per-class centroids and spread.

The embedding is a principal-component projection with a fixed sign
convention, so it is exactly reproducible and duplicate inputs land on
identical points.  (The seed parameter is accepted for interface
stability; a linear projection needs no randomness.)
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
from matplotlib.patches import Ellipse

from ..errors import EvaluationError


@dataclass
class ProjectionResult:
    points: np.ndarray  # (N, 2)
    labels: np.ndarray  # (N,)
    centroids: Dict[int, np.ndarray]  # label -> (2,)
    stds: Dict[int, np.ndarray]  # label -> (2,) per-axis standard deviation


def project_2d(vectors: np.ndarray, seed: int = 0) -> np.ndarray:
    """Project (N, D) vectors onto their top two principal axes."""
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[0] < 2:
        raise EvaluationError(
            f"projection needs at least 2 vectors of equal dimension, got shape {vectors.shape}"
        )
    if vectors.shape[1] < 2:
        raise EvaluationError("projection needs input dimension >= 2")
    centered = vectors - vectors.mean(axis=0, keepdims=True)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:2]
    # Fix each component's sign: largest-magnitude loading positive.
    for row in components:
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0:
            row *= -1.0
    return centered @ components.T


def cluster_stats(
    points: np.ndarray, labels: Sequence[int]
) -> Tuple[Dict[int, np.ndarray], Dict[int, np.ndarray]]:
    """Per-label centroid and per-axis (population) standard deviation."""
    labels = np.asarray(labels)
    centroids: Dict[int, np.ndarray] = {}
    stds: Dict[int, np.ndarray] = {}
    for label in np.unique(labels):
        cluster = points[labels == label]
        centroids[int(label)] = cluster.mean(axis=0)
        stds[int(label)] = cluster.std(axis=0, ddof=0)
    return centroids, stds


def export_projection(
    vectors: np.ndarray,
    labels: Sequence[int],
    plot_path: Optional[str] = None,
    points_path: Optional[str] = None,
    seed: int = 0,
    label_names: Optional[Sequence[str]] = None,
) -> ProjectionResult:
    """Project, compute cluster statistics, and optionally render/write files."""
    labels = np.asarray(list(labels), dtype=np.int64)
    points = project_2d(vectors, seed=seed)
    if labels.shape[0] != points.shape[0]:
        raise EvaluationError(
            f"{points.shape[0]} vectors but {labels.shape[0]} labels"
        )
    centroids, stds = cluster_stats(points, labels)
    result = ProjectionResult(points=points, labels=labels, centroids=centroids, stds=stds)

    if points_path is not None:
        with open(points_path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["label", "x", "y"])
            for label, point in zip(labels, points):
                writer.writerow([int(label), repr(float(point[0])), repr(float(point[1]))])

    if plot_path is not None:
        _render(result, plot_path, label_names)
    return result


def _render(result: ProjectionResult, path: str, label_names: Optional[Sequence[str]]) -> None:
    fig, ax = plt.subplots(figsize=(7, 6))
    cmap = plt.get_cmap("tab10")
    for i, label in enumerate(sorted(result.centroids)):
        color = cmap(i % 10)
        mask = result.labels == label
        name = label_names[label] if label_names is not None else f"class {label}"
        ax.scatter(
            result.points[mask, 0], result.points[mask, 1],
            s=12, alpha=0.55, color=color, label=name,
        )
        cx, cy = result.centroids[label]
        sx, sy = result.stds[label]
        ax.scatter([cx], [cy], marker="X", s=90, color=color, edgecolor="black", zorder=3)
        ax.add_patch(
            Ellipse(
                (cx, cy), width=2 * sx, height=2 * sy,
                fill=False, color=color, linewidth=1.4, zorder=2,
            )
        )
    ax.set_xlabel("component 1")
    ax.set_ylabel("component 2")
    ax.set_title("conditioning-vector projection (centroids and std ellipses)")
    ax.legend(fontsize=8, loc="best", ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
