"""Report writers: delimited metric tables, training logs, and figures.

Every artifact embeds the resolved run configuration (self-describing
runs) and contains no timestamps, so identical runs produce byte-identical
files.  Floats are written with ``repr`` (shortest round-trip form).
"""

from __future__ import annotations

import json
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .ablation import AblationResult


def _config_header(config_echo: Mapping) -> str:
    return "# config: " + json.dumps(config_echo, sort_keys=True, default=str)


def write_metrics_log(path: str, history: Sequence[Dict]) -> None:
    """Line-delimited training log: one JSON record per epoch."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in history:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def write_metric_report(
    path: str,
    recall_rows: Sequence[Tuple[int, int, float]],
    alignment: Optional[float],
    config_echo: Mapping,
) -> None:
    """The evaluation report: (k, x, recall) rows plus the alignment diagnostic."""
    lines = [_config_header(config_echo), "metric,k,x,value"]
    for k, x, value in recall_rows:
        lines.append(f"recall,{k},{x},{value!r}")
    if alignment is not None:
        lines.append(f"alignment_norm,,,{alignment!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def render_metric_figure(
    path: str, recall_rows: Sequence[Tuple[int, int, float]], title: str = "recall metrics"
) -> None:
    labels = [f"R_{k}@{x}" for k, x, _ in recall_rows]
    values = [v for _, _, v in recall_rows]
    fig, ax = plt.subplots(figsize=(1.8 + 1.2 * len(values), 4))
    bars = ax.bar(labels, values, color="tab:blue", width=0.6)
    ax.bar_label(bars, fmt="%.3f", padding=2, fontsize=8)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("recall")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_ablation_report(path: str, result: AblationResult, config_echo: Mapping) -> None:
    """Per-variant rows: one line per seed plus a mean line per variant."""
    metric_names: List[str] = []
    for cell in result.cells:
        for name in cell.metrics:
            if name not in metric_names:
                metric_names.append(name)
    lines = [_config_header(config_echo), "variant,seed," + ",".join(metric_names)]
    variants: List[str] = []
    for cell in result.cells:
        if cell.variant not in variants:
            variants.append(cell.variant)
        values = ",".join(
            repr(cell.metrics[m]) if m in cell.metrics else "" for m in metric_names
        )
        lines.append(f"{cell.variant},{cell.seed},{values}")
    for variant in variants:
        values = []
        for m in metric_names:
            try:
                values.append(repr(result.mean(variant, m)))
            except KeyError:
                values.append("")
        lines.append(f"{variant},mean," + ",".join(values))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def render_ablation_figure(path: str, result: AblationResult, metric: str = "r1_at_50") -> None:
    variants: List[str] = []
    for cell in result.cells:
        if cell.variant not in variants and metric in cell.metrics:
            variants.append(cell.variant)
    means = [result.mean(v, metric) for v in variants]
    fig, ax = plt.subplots(figsize=(1.5 + 1.1 * len(variants), 4.5))
    bars = ax.bar(variants, means, color="tab:orange", width=0.6)
    ax.bar_label(bars, fmt="%.3f", padding=2, fontsize=8)
    for variant, mean in zip(variants, means):
        seeds = result.per_seed(variant, metric)
        ax.scatter([variant] * len(seeds), list(seeds.values()), color="black", s=10, zorder=3)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel(metric)
    ax.set_title(f"component study, mean {metric} over seeds {list(result.seeds)}")
    plt.setp(ax.get_xticklabels(), rotation=20, ha="right")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
