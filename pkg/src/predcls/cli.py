"""Command-line entry point.

Subcommands: ``synth`` (generate a synthetic dataset), ``train``, ``eval``,
``ablate`` (the component study) and ``project`` (2-D conditioning-vector
export).  Option precedence is flags > config file (YAML) > built-in
defaults; every command echoes its resolved configuration into its output
artifacts.  The default output directory can be set via ``PREDCLS_OUT``.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import asdict, fields, replace
from typing import Dict, Optional

import click
import yaml

from .ablation import BenchmarkSpec, run_ablation, summarize_ordering
from .data.annotations import load_dataset_dir, load_vocab, save_annotations
from .data.synthetic import SyntheticSpec, generate_synthetic, object_names, predicate_names
from .errors import ConfigError, PredclsError
from .evaluation.alignment import alignment_norm
from .evaluation.predict import prediction_records, write_prediction_file
from .evaluation.projection import export_projection
from .evaluation.recall import RecallConfig, default_metric_grid, recall_k_at_x
from .model.losses import LossWeights
from .provision import DataConfig, assemble_from_config
from .reporting import (
    render_ablation_figure,
    render_metric_figure,
    write_ablation_report,
    write_metric_report,
    write_metrics_log,
)
from .training.checkpoint import load_checkpoint, save_checkpoint
from .training.config import TrainConfig
from .training.loop import derive_model_config, train


def _load_config_file(path: Optional[str]) -> Dict:
    if path is None:
        return {}
    with open(path, "r", encoding="utf-8") as fh:
        loaded = yaml.safe_load(fh) or {}
    if not isinstance(loaded, dict):
        raise ConfigError(f"config file {path} must contain a mapping")
    return loaded


def _build(cls, section: Dict, overrides: Dict, **fixed):
    """Construct ``cls`` from defaults < config-file section < CLI overrides."""
    values = dict(section)
    values.update({k: v for k, v in overrides.items() if v is not None})
    values.update(fixed)
    known = {f.name for f in fields(cls)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return cls(**values)


def _write_json(path: str, payload: Dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True, default=str)
        fh.write("\n")


def _out_dir(out: str) -> str:
    os.makedirs(out, exist_ok=True)
    return out


_out_option = click.option(
    "--out", envvar="PREDCLS_OUT", required=True,
    help="Output directory (env: PREDCLS_OUT).",
)
_config_option = click.option(
    "--config", "config_path", type=click.Path(exists=True), default=None,
    help="YAML config file; flags override its values.",
)


@click.group()
def cli() -> None:
    """Pair predicate classification: data synthesis, training, evaluation."""


@cli.command()
@_out_option
@_config_option
@click.option("--n-images", type=int, default=None)
@click.option("--pairs-per-image", type=int, default=None)
@click.option("--n-obj", type=int, default=None)
@click.option("--n-pred", type=int, default=None)
@click.option("--n-semantic", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--label-noise", type=float, default=None)
def synth(out, config_path, **options) -> None:
    """Generate a synthetic dataset with known generative labels."""
    section = _load_config_file(config_path).get("synth", {})
    defaults = {"n_images": 125, "pairs_per_image": 4, "n_obj": 12, "n_pred": 24, "seed": 0}
    spec = _build(SyntheticSpec, {**defaults, **section}, options)
    bundle = generate_synthetic(spec)
    out = _out_dir(out)
    paths = save_annotations(
        bundle,
        out,
        object_names(spec.n_obj),
        predicate_names(spec.n_pred, spec.n_semantic),
    )
    _write_json(os.path.join(out, "synth_config.json"), asdict(spec))
    click.echo(f"wrote {len(bundle)} pairs across {spec.n_images} images to {out}")
    for role, path in paths.items():
        click.echo(f"  {role}: {path}")


def _data_options(fn):
    for option in reversed([
        click.option("--features", default=None,
                     help="'synthetic' or a precomputed .npz feature file."),
        click.option("--feature-seed", type=int, default=None),
        click.option("--visual-dim", type=int, default=None),
        click.option("--map-channels", type=int, default=None),
        click.option("--map-size", type=int, default=None),
        click.option("--class-signal", type=float, default=None),
        click.option("--visual-noise", type=float, default=None),
        click.option("--map-signal", type=float, default=None),
        click.option("--map-noise", type=float, default=None),
        click.option("--embeddings", default=None,
                     help="'synthetic' or a text embedding file."),
        click.option("--embed-dim", type=int, default=None),
        click.option("--embedding-seed", type=int, default=None),
        click.option("--mask-resolution", type=int, default=None),
    ]):
        fn = option(fn)
    return fn


def _split_options(options: Dict, cls) -> Dict:
    names = {f.name for f in fields(cls)}
    return {k: options.pop(k) for k in list(options) if k in names}


@cli.command("train")
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True,
              help="Dataset directory (annotations, vocabularies, image sizes).")
@_out_option
@_config_option
@_data_options
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--base-lr", type=float, default=None)
@click.option("--lr-drop-epochs", default=None, help="Comma-separated epochs, e.g. '5,9'.")
@click.option("--lr-drop-factor", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--attention-mode", type=click.Choice(["none", "LA", "SA", "SLA"]), default=None)
@click.option("--branch-mode", type=click.Choice(["P", "OS", "both"]), default=None)
@click.option("--deep-supervision/--no-deep-supervision", "deep_supervision", default=None)
@click.option("--val-fraction", type=float, default=None)
@click.option("--lambda-fused", type=float, default=None)
@click.option("--lambda-p", type=float, default=None)
@click.option("--lambda-os", type=float, default=None)
@click.option("--attn-dim", type=int, default=None)
@click.option("--feat-dim", type=int, default=None)
@click.option("--rank", type=int, default=None)
def train_cmd(data_dir, out, config_path, **options) -> None:
    """Train a model on a dataset directory."""
    file_cfg = _load_config_file(config_path)
    if options.get("lr_drop_epochs") is not None:
        options["lr_drop_epochs"] = tuple(
            int(e) for e in str(options["lr_drop_epochs"]).split(",") if e
        )
    lambdas = {
        "fused": options.pop("lambda_fused"),
        "p": options.pop("lambda_p"),
        "os": options.pop("lambda_os"),
    }
    model_overrides = {
        k: options.pop(k) for k in ("attn_dim", "feat_dim", "rank")
    }
    data_cfg = _build(DataConfig, file_cfg.get("data", {}), _split_options(options, DataConfig))
    train_section = dict(file_cfg.get("train", {}))
    if "loss_weights" in train_section:
        train_section["loss_weights"] = LossWeights(**train_section["loss_weights"])
    if "lr_drop_epochs" in train_section:
        train_section["lr_drop_epochs"] = tuple(train_section["lr_drop_epochs"])
    cfg = _build(TrainConfig, train_section, options)
    if any(v is not None for v in lambdas.values()):
        weights = replace(
            cfg.loss_weights, **{k: v for k, v in lambdas.items() if v is not None}
        )
        cfg = replace(cfg, loss_weights=weights)

    bundle = load_dataset_dir(data_dir)
    class_names = load_vocab(os.path.join(data_dir, "objects.txt"))
    tensors = assemble_from_config(bundle, data_cfg, class_names)
    model_cfg = derive_model_config(
        tensors, cfg,
        **{k: v for k, v in {**file_cfg.get("model", {}), **model_overrides}.items()
           if v is not None},
    )
    result = train(tensors, cfg, model_cfg)

    out = _out_dir(out)
    checkpoint_path = os.path.join(out, "checkpoint.npz")
    save_checkpoint(checkpoint_path, result.model, cfg, data_cfg)
    write_metrics_log(os.path.join(out, "train_log.jsonl"), result.history)
    _write_json(
        os.path.join(out, "run_config.json"),
        {
            "data_dir": str(data_dir),
            "train": asdict(cfg),
            "data": asdict(data_cfg),
            "model": asdict(result.model_config),
        },
    )
    last = result.history[-1] if result.history else {}
    click.echo(
        f"trained {cfg.epochs} epochs on {len(tensors)} pairs; "
        f"final train loss {last.get('train_loss', float('nan')):.4f}, "
        f"val R_1@50 {last.get('val_r1_at_50', float('nan')):.4f}"
    )
    click.echo(f"checkpoint: {checkpoint_path}")


def _parse_metric(spec: str) -> RecallConfig:
    try:
        k, x = spec.split(":")
        return RecallConfig(k=int(k), x=int(x))
    except ValueError:
        raise ConfigError(f"metric must look like 'k:x', got {spec!r}") from None


@cli.command("eval")
@click.option("--checkpoint", "checkpoint_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@_out_option
@click.option("--metric", "metrics", multiple=True,
              help="Recall setting 'k:x'; repeatable. Default: 1:50, full:50, full:100.")
@click.option("--per-image", is_flag=True, default=False,
              help="Average recalls per image instead of micro-averaging.")
def eval_cmd(checkpoint_path, data_dir, out, metrics, per_image) -> None:
    """Evaluate a checkpoint on a dataset directory."""
    payload = load_checkpoint(checkpoint_path)
    data_cfg = payload.data_config or DataConfig()
    bundle = load_dataset_dir(data_dir)
    class_names = load_vocab(os.path.join(data_dir, "objects.txt"))
    tensors = assemble_from_config(bundle, data_cfg, class_names)

    grid = [_parse_metric(m) for m in metrics] if metrics else default_metric_grid(bundle.n_pred)
    records = prediction_records(payload.model, tensors)
    average = "per_image" if per_image else "micro"
    rows = [
        (rc.k, rc.x, recall_k_at_x(records, tensors.groundtruth(), rc,
                                   average=average, n_pred=bundle.n_pred))
        for rc in grid
    ]
    alignment = None
    if payload.model_config.branch_mode == "both":
        alignment = alignment_norm(payload.model, tensors)

    out = _out_dir(out)
    config_echo = {
        "checkpoint": str(checkpoint_path),
        "data_dir": str(data_dir),
        "average": average,
        "metrics": [f"{rc.k}:{rc.x}" for rc in grid],
        "data": asdict(data_cfg),
        "model": asdict(payload.model_config),
    }
    report_path = os.path.join(out, "metrics.csv")
    write_metric_report(report_path, rows, alignment, config_echo)
    render_metric_figure(os.path.join(out, "metrics.png"), rows)
    write_prediction_file(os.path.join(out, "predictions.csv"), records)
    for k, x, value in rows:
        click.echo(f"R_{k}@{x} = {value:.4f}")
    if alignment is not None:
        click.echo(f"alignment_norm = {alignment:.4f}")
    click.echo(f"report: {report_path}")


@cli.command()
@_out_option
@_config_option
@click.option("--seeds", default=None, help="Comma-separated training seeds, default '0,1,2'.")
@click.option("--train-images", type=int, default=None)
@click.option("--test-images", type=int, default=None)
@click.option("--pairs-per-image", type=int, default=None)
@click.option("--n-obj", type=int, default=None)
@click.option("--n-pred", type=int, default=None)
@click.option("--n-semantic", type=int, default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--base-lr", type=float, default=None)
def ablate(out, config_path, seeds, **options) -> None:
    """Run the component study on the synthetic benchmark."""
    file_cfg = _load_config_file(config_path)
    seeds = tuple(int(s) for s in (seeds or "0,1,2").split(",") if s)
    data_cfg = _build(DataConfig, file_cfg.get("data", {}), {})
    train_overrides = {
        k: options.pop(k) for k in ("epochs", "batch_size", "base_lr")
    }
    benchmark = _build(
        BenchmarkSpec, file_cfg.get("ablation", {}), options, data=data_cfg
    )
    base_cfg = _build(TrainConfig, file_cfg.get("train", {}), train_overrides)
    result = run_ablation(
        seeds=seeds, benchmark=benchmark, base_config=base_cfg, progress=click.echo
    )

    out = _out_dir(out)
    config_echo = {
        "seeds": list(seeds),
        "benchmark": asdict(benchmark),
        "train": asdict(base_cfg),
    }
    write_ablation_report(os.path.join(out, "ablation.csv"), result, config_echo)
    render_ablation_figure(os.path.join(out, "ablation.png"), result)
    _write_json(os.path.join(out, "ablation_config.json"), config_echo)

    summary = summarize_ordering(result)
    click.echo(
        "margins (recall points): "
        f"full-vs-partial-attention {summary.full_vs_best_partial_attention:+.2f}, "
        f"partial-vs-none {summary.best_partial_attention_vs_none:+.2f}, "
        f"full-vs-single-branch {summary.full_vs_best_single_branch:+.2f}"
    )
    for seed, (with_ds, without_ds) in summary.alignment_ds_vs_no_ds.items():
        click.echo(
            f"alignment seed {seed}: {with_ds:.4f} with deep supervision "
            f"vs {without_ds:.4f} without"
        )
    click.echo(f"report: {os.path.join(out, 'ablation.csv')}")


@cli.command()
@click.option("--checkpoint", "checkpoint_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@_out_option
@click.option("--seed", type=int, default=0)
def project(checkpoint_path, data_dir, out, seed) -> None:
    """Export the 2-D projection of the conditioning vectors on a dataset."""
    payload = load_checkpoint(checkpoint_path)
    data_cfg = payload.data_config or DataConfig()
    bundle = load_dataset_dir(data_dir)
    class_names = load_vocab(os.path.join(data_dir, "objects.txt"))
    predicate_vocab = load_vocab(os.path.join(data_dir, "predicates.txt"))
    tensors = assemble_from_config(bundle, data_cfg, class_names)

    import torch

    with torch.no_grad():
        vectors = payload.model.conditioning_vectors(
            tensors.masks, tensors.subject_emb, tensors.object_emb
        ).numpy()
    labels = [min(gt) for gt in tensors.gt_sets]

    out = _out_dir(out)
    plot_path = os.path.join(out, "projection.png")
    points_path = os.path.join(out, "projection_points.csv")
    export_projection(
        vectors, labels, plot_path=plot_path, points_path=points_path,
        seed=seed, label_names=predicate_vocab,
    )
    click.echo(f"projected {len(labels)} pairs; plot: {plot_path}")


def main() -> None:
    try:
        cli(standalone_mode=False)
    except click.ClickException as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        sys.exit(exc.exit_code if exc.exit_code else 1)
    except click.exceptions.Abort:
        sys.exit(130)
    except PredclsError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    except Exception as exc:  # single-line diagnostic contract for the CLI
        click.echo(f"error: {type(exc).__name__}: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
