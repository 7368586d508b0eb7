"""Component-removal study on the seeded synthetic benchmark.

Seven variants, removing one component at a time: the three attention
settings below the full one (none / language-only / spatial-only, all
with both branches and deep supervision), the two single branches, and
the two-branch model without deep supervision.

The synthetic labels need both a spatial cue and a semantic cue, and the
visual features expose each cue only noisily, so variants that lose an
attention input or a branch lose measurable accuracy.  Word embeddings
and the feature extractor play the role of frozen pretrained components:
they do not vary with the benchmark seed, while data sampling, parameter
initialization and batch order all do.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .data.synthetic import SyntheticSpec, generate_synthetic
from .errors import ConfigError
from .evaluation.alignment import alignment_norm
from .evaluation.predict import prediction_records
from .evaluation.recall import RecallConfig, recall_k_at_x
from .provision import DataConfig, assemble_from_config
from .training.config import TrainConfig
from .training.loop import train

FULL_VARIANT = "SLA+P+OS+DS"
NO_DS_VARIANT = "SLA+P+OS"


@dataclass(frozen=True)
class AblationVariant:
    name: str
    attention_mode: str
    branch_mode: str
    deep_supervision: bool


ABLATION_GRID: Tuple[AblationVariant, ...] = (
    AblationVariant("P+OS+DS", "none", "both", True),
    AblationVariant("LA+P+OS+DS", "LA", "both", True),
    AblationVariant("SA+P+OS+DS", "SA", "both", True),
    AblationVariant("SLA+P", "SLA", "P", False),
    AblationVariant("SLA+OS", "SLA", "OS", False),
    AblationVariant(NO_DS_VARIANT, "SLA", "both", False),
    AblationVariant(FULL_VARIANT, "SLA", "both", True),
)


@dataclass(frozen=True)
class BenchmarkSpec:
    """Synthetic benchmark sizes; 500 x 4 train and 125 x 4 test pairs by default."""

    train_images: int = 500
    test_images: int = 125
    pairs_per_image: int = 4
    n_obj: int = 12
    n_pred: int = 24
    n_semantic: int = 4
    test_seed_offset: int = 7919
    data: DataConfig = field(default_factory=DataConfig)


@dataclass
class AblationCell:
    variant: str
    seed: int
    metrics: Dict[str, float]  # metric name -> value


@dataclass
class AblationResult:
    cells: List[AblationCell]
    seeds: Tuple[int, ...]
    benchmark: BenchmarkSpec
    train_config: TrainConfig

    def mean(self, variant: str, metric: str) -> float:
        values = [
            c.metrics[metric]
            for c in self.cells
            if c.variant == variant and metric in c.metrics
        ]
        if not values:
            raise KeyError(f"no values for variant {variant!r}, metric {metric!r}")
        return sum(values) / len(values)

    def per_seed(self, variant: str, metric: str) -> Dict[int, float]:
        return {
            c.seed: c.metrics[metric]
            for c in self.cells
            if c.variant == variant and metric in c.metrics
        }


def benchmark_tensors(benchmark: BenchmarkSpec, seed: int):
    """(train, test) tensors for one benchmark seed, assembled once."""
    train_bundle = generate_synthetic(
        SyntheticSpec(
            n_images=benchmark.train_images,
            pairs_per_image=benchmark.pairs_per_image,
            n_obj=benchmark.n_obj,
            n_pred=benchmark.n_pred,
            seed=seed,
            n_semantic=benchmark.n_semantic,
        )
    )
    test_bundle = generate_synthetic(
        SyntheticSpec(
            n_images=benchmark.test_images,
            pairs_per_image=benchmark.pairs_per_image,
            n_obj=benchmark.n_obj,
            n_pred=benchmark.n_pred,
            seed=seed + benchmark.test_seed_offset,
            n_semantic=benchmark.n_semantic,
        )
    )
    return (
        assemble_from_config(train_bundle, benchmark.data),
        assemble_from_config(test_bundle, benchmark.data),
    )


def run_ablation(
    seeds: Sequence[int] = (0, 1, 2),
    benchmark: BenchmarkSpec = BenchmarkSpec(),
    base_config: TrainConfig = TrainConfig(),
    variants: Sequence[AblationVariant] = ABLATION_GRID,
    progress: Optional[Callable[[str], None]] = None,
) -> AblationResult:
    """Train every variant on every seed and score it on the held-out pairs."""
    if not seeds:
        raise ConfigError("at least one seed is required")
    cells: List[AblationCell] = []
    n_pred = benchmark.n_pred
    grid = [
        ("r1_at_50", RecallConfig(k=1, x=50)),
        (f"r{n_pred}_at_50", RecallConfig(k=n_pred, x=50)),
        (f"r{n_pred}_at_100", RecallConfig(k=n_pred, x=100)),
    ]
    for seed in seeds:
        train_tensors, test_tensors = benchmark_tensors(benchmark, seed)
        for variant in variants:
            cfg = replace(
                base_config,
                seed=seed,
                attention_mode=variant.attention_mode,
                branch_mode=variant.branch_mode,
                deep_supervision=variant.deep_supervision,
            )
            result = train(train_tensors, cfg)
            records = prediction_records(result.model, test_tensors)
            gt = test_tensors.groundtruth()
            metrics = {
                name: recall_k_at_x(records, gt, rc, n_pred=n_pred)
                for name, rc in grid
            }
            if variant.branch_mode == "both":
                metrics["alignment"] = alignment_norm(result.model, test_tensors)
            cells.append(AblationCell(variant=variant.name, seed=seed, metrics=metrics))
            if progress is not None:
                shown = ", ".join(f"{k}={v:.4f}" for k, v in metrics.items())
                progress(f"seed {seed} {variant.name}: {shown}")
    return AblationResult(
        cells=cells, seeds=tuple(seeds), benchmark=benchmark, train_config=base_config
    )


@dataclass
class OrderingSummary:
    """The component-ordering margins, in recall points (x100)."""

    full_vs_best_partial_attention: float
    best_partial_attention_vs_none: float
    full_vs_best_single_branch: float
    alignment_ds_vs_no_ds: Dict[int, Tuple[float, float]]  # seed -> (with DS, without)


def summarize_ordering(result: AblationResult) -> OrderingSummary:
    full = result.mean(FULL_VARIANT, "r1_at_50")
    best_partial = max(
        result.mean("LA+P+OS+DS", "r1_at_50"), result.mean("SA+P+OS+DS", "r1_at_50")
    )
    none = result.mean("P+OS+DS", "r1_at_50")
    best_single = max(result.mean("SLA+P", "r1_at_50"), result.mean("SLA+OS", "r1_at_50"))
    with_ds = result.per_seed(FULL_VARIANT, "alignment")
    without_ds = result.per_seed(NO_DS_VARIANT, "alignment")
    return OrderingSummary(
        full_vs_best_partial_attention=100.0 * (full - best_partial),
        best_partial_attention_vs_none=100.0 * (best_partial - none),
        full_vs_best_single_branch=100.0 * (full - best_single),
        alignment_ds_vs_no_ds={
            seed: (with_ds[seed], without_ds[seed]) for seed in sorted(with_ds)
        },
    )
