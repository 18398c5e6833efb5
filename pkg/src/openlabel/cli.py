"""Command-line interface.

Every stage is independently runnable from the previous stage's artifacts
in the ``--out`` directory.  Options may come from a JSON config file via
``--config``; explicit flags override file values, which override
defaults.  Exit codes: 0 success, 1 validation error (bad config, bundle,
or artifact), 2 runtime failure.
"""

from __future__ import annotations

import json
import sys
from dataclasses import fields as dataclass_fields
from pathlib import Path

import click
import numpy as np

from . import artifacts
from .adapter import LinearAdapter, TrainConfig, adapt, identity_params
from .bundle import load_bundle, normalize_rows, save_bundle
from .cluster import KMeans
from .discovery import discover_candidates, source_profiles
from .errors import OpenLabelError, ValidationError
from .matching import build_similarity_matrix, match_and_prune
from .metrics import evaluate, format_table, ground_truth_map
from .pipeline import (
    STRATEGIES,
    PipelineConfig,
    compare_strategies,
    run_pipeline,
)
from .pseudolabel import select_pseudo_labels
from .synth import GroundTruth, SynthConfig, generate
from .zeroshot import DEFAULT_TEMPERATURE, build_extended_label_set, predict_batch


def _load_config_file(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"config file not found: {p}")
    try:
        obj = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{p}: invalid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ValidationError(f"{p}: config must be a JSON object")
    return obj


class Options:
    """Flag > config file > default resolution."""

    def __init__(self, config_path: str | None):
        self.file = _load_config_file(config_path)

    def get(self, key: str, flag_value, default):
        if flag_value is not None:
            return flag_value
        if key in self.file:
            return self.file[key]
        return default


def _load_ground_truth(
    explicit: str | None, bundle_path: str | None
) -> GroundTruth | None:
    path = None
    if explicit is not None:
        path = Path(explicit)
        if not path.is_file():
            raise ValidationError(f"ground truth file not found: {path}")
    elif bundle_path is not None:
        candidate = Path(bundle_path) / artifacts.GROUND_TRUTH_JSON
        if candidate.is_file():
            path = candidate
    if path is None:
        return None
    return GroundTruth.from_json_dict(json.loads(path.read_text()))


def _adapter_params(adapter_dir: str | None, dim: int):
    if adapter_dir is None:
        return identity_params(dim)
    W, b = artifacts.read_adapter(Path(adapter_dir))
    if W.shape[0] != dim:
        raise ValidationError(
            f"adapter dim {W.shape[0]} does not match bundle dim {dim}"
        )
    return W, b


def _target_matrix(bundle) -> np.ndarray:
    return np.asarray(
        [bundle.embedding_of(v) for v in bundle.target_videos()], dtype=np.float64
    )


_CONFIG_OPTION = click.option(
    "--config", "config_path", type=str, default=None, help="JSON config file."
)


@click.group()
def cli() -> None:
    """Open-set label discovery over embedding bundles."""


@cli.command("synth")
@click.option("--out", type=str, default=None, help="Bundle output directory.")
@click.option("--shared-classes", "-K", type=int, default=None)
@click.option("--private-classes", "-M", type=int, default=None)
@click.option("--videos-per-class", "-n", type=int, default=None)
@click.option("--dim", type=int, default=None)
@click.option("--frames-per-video", type=int, default=None)
@click.option("--attributes-per-frame", type=int, default=None)
@click.option("--sigma", type=float, default=None)
@click.option("--salient-per-class", type=int, default=None)
@click.option("--distractor-vocab", type=int, default=None)
@click.option("--p-distract", type=float, default=None)
@click.option("--seed", type=int, default=None)
@_CONFIG_OPTION
def synth_cmd(config_path, out, **flags) -> None:
    """Generate a synthetic bundle plus ground_truth.json."""
    opts = Options(config_path)
    out = opts.get("out", out, None)
    if out is None:
        raise ValidationError("synth requires --out")
    config = SynthConfig(
        shared_classes=int(opts.get("shared_classes", flags["shared_classes"], 4)),
        private_classes=int(opts.get("private_classes", flags["private_classes"], 3)),
        videos_per_class=int(
            opts.get("videos_per_class", flags["videos_per_class"], 20)
        ),
        dim=int(opts.get("dim", flags["dim"], 64)),
        frames_per_video=int(
            opts.get("frames_per_video", flags["frames_per_video"], 8)
        ),
        attributes_per_frame=int(
            opts.get("attributes_per_frame", flags["attributes_per_frame"], 5)
        ),
        sigma=float(opts.get("sigma", flags["sigma"], 0.15)),
        salient_per_class=int(
            opts.get("salient_per_class", flags["salient_per_class"], 3)
        ),
        distractor_vocab=int(
            opts.get("distractor_vocab", flags["distractor_vocab"], 50)
        ),
        p_distract=float(opts.get("p_distract", flags["p_distract"], 0.3)),
        seed=int(opts.get("seed", flags["seed"], 0)),
    )
    bundle, truth = generate(config)
    save_bundle(bundle, out)
    artifacts.write_json(
        Path(out) / artifacts.GROUND_TRUTH_JSON, truth.to_json_dict()
    )
    click.echo(f"wrote bundle with {len(bundle.videos)} videos to {out}")


@cli.command("cluster")
@click.option("--bundle", "bundle_path", type=str, default=None)
@click.option("--out", type=str, default=None)
@click.option("--clusters", type=int, default=None, help="Default: 2x shared classes.")
@click.option("--adapter", "adapter_dir", type=str, default=None)
@click.option("--max-iter", type=int, default=None)
@click.option("--seed", type=int, default=None)
@_CONFIG_OPTION
def cluster_cmd(config_path, bundle_path, out, clusters, adapter_dir, max_iter, seed):
    """Cluster (optionally adapted) target embeddings."""
    opts = Options(config_path)
    bundle_path = opts.get("bundle", bundle_path, None)
    out = opts.get("out", out, None)
    if bundle_path is None or out is None:
        raise ValidationError("cluster requires --bundle and --out")
    bundle = load_bundle(bundle_path)
    k = int(opts.get("clusters", clusters, 2 * bundle.num_shared))
    W, b = _adapter_params(opts.get("adapter", adapter_dir, None), bundle.dim)
    points = adapt(W, b, _target_matrix(bundle))
    model = KMeans(
        n_clusters=k,
        seed=int(opts.get("seed", seed, 0)),
        max_iter=int(opts.get("max_iter", max_iter, 100)),
    ).fit(points)
    artifacts.write_clusters(Path(out), model, [v.id for v in bundle.target_videos()])
    click.echo(
        f"clustered {points.shape[0]} target videos into {k} clusters "
        f"(inertia {model.inertia_:.4f}) -> {out}"
    )


def _discovery_params(opts: Options, m, t, argtop_k, tfidf_threshold):
    return (
        int(opts.get("attributes_per_video", m, 5)),
        int(opts.get("profile_size", t, 3)),
        int(opts.get("argtop_k", argtop_k, 20)),
        float(opts.get("tfidf_threshold", tfidf_threshold, 0.5)),
    )


@cli.command("discover")
@click.option("--bundle", "bundle_path", type=str, default=None)
@click.option("--out", type=str, default=None)
@click.option("--clusters-file", type=str, default=None)
@click.option("--attributes-per-video", "-m", "m", type=int, default=None)
@click.option("--profile-size", "-t", "t", type=int, default=None)
@click.option("--argtop-k", type=int, default=None)
@click.option("--tfidf-threshold", type=float, default=None)
@_CONFIG_OPTION
def discover_cmd(
    config_path, bundle_path, out, clusters_file, m, t, argtop_k, tfidf_threshold
):
    """Build candidate labels from cluster attribute profiles."""
    opts = Options(config_path)
    bundle_path = opts.get("bundle", bundle_path, None)
    out = opts.get("out", out, None)
    if bundle_path is None or out is None:
        raise ValidationError("discover requires --bundle and --out")
    bundle = load_bundle(bundle_path)
    clusters_file = opts.get(
        "clusters_file", clusters_file, str(Path(out) / artifacts.CLUSTERS_JSON)
    )
    assignments, k = artifacts.read_clusters(Path(clusters_file))
    targets = bundle.target_videos()
    missing = [v.id for v in targets if v.id not in assignments]
    if missing:
        raise ValidationError(
            f"clusters file lacks assignments for {len(missing)} target videos "
            f"(first: {missing[0]!r})"
        )
    m, t, argtop_k, tfidf_threshold = _discovery_params(
        opts, m, t, argtop_k, tfidf_threshold
    )
    candidates, warnings = discover_candidates(
        targets,
        [assignments[v.id] for v in targets],
        k,
        bundle.attribute_vocab,
        m,
        t,
        argtop_k,
        tfidf_threshold,
    )
    for warning in warnings:
        click.echo(f"warning: {warning}", err=True)
    artifacts.write_candidates(Path(out), candidates, bundle.attribute_vocab)
    click.echo(f"discovered {len(candidates)} candidates -> {out}")


@cli.command("match")
@click.option("--bundle", "bundle_path", type=str, default=None)
@click.option("--out", type=str, default=None)
@click.option("--candidates-file", type=str, default=None)
@click.option("--gamma", type=float, default=None)
@click.option("--attributes-per-video", "-m", "m", type=int, default=None)
@click.option("--profile-size", "-t", "t", type=int, default=None)
@click.option("--argtop-k", type=int, default=None)
@click.option("--tfidf-threshold", type=float, default=None)
@_CONFIG_OPTION
def match_cmd(
    config_path,
    bundle_path,
    out,
    candidates_file,
    gamma,
    m,
    t,
    argtop_k,
    tfidf_threshold,
):
    """Prune candidates that rediscover shared classes."""
    opts = Options(config_path)
    bundle_path = opts.get("bundle", bundle_path, None)
    out = opts.get("out", out, None)
    if bundle_path is None or out is None:
        raise ValidationError("match requires --bundle and --out")
    bundle = load_bundle(bundle_path)
    candidates_file = opts.get(
        "candidates_file", candidates_file, str(Path(out) / artifacts.CANDIDATES_JSON)
    )
    candidates = artifacts.read_candidates(
        Path(candidates_file), bundle.attribute_vocab
    )
    m, t, argtop_k, tfidf_threshold = _discovery_params(
        opts, m, t, argtop_k, tfidf_threshold
    )
    gamma = float(opts.get("gamma", gamma, 0.5))
    profiles = source_profiles(
        bundle.source_videos(), bundle.shared_names, m, t, argtop_k, tfidf_threshold
    )
    matrix = build_similarity_matrix(profiles, bundle.shared_names, candidates)
    survivors, pruned = match_and_prune(matrix, gamma, candidates)
    artifacts.write_matches(
        Path(out), matrix, gamma, survivors, pruned, bundle.attribute_vocab
    )
    click.echo(
        f"matched {len(candidates)} candidates: {len(survivors)} kept, "
        f"{len(pruned)} pruned -> {out}"
    )


@cli.command("predict")
@click.option("--bundle", "bundle_path", type=str, default=None)
@click.option("--out", type=str, default=None)
@click.option("--matches-file", type=str, default=None)
@click.option("--adapter", "adapter_dir", type=str, default=None)
@click.option("--temperature", type=float, default=None)
@_CONFIG_OPTION
def predict_cmd(config_path, bundle_path, out, matches_file, adapter_dir, temperature):
    """Zero-shot predictions over shared labels plus surviving candidates."""
    opts = Options(config_path)
    bundle_path = opts.get("bundle", bundle_path, None)
    out = opts.get("out", out, None)
    if bundle_path is None or out is None:
        raise ValidationError("predict requires --bundle and --out")
    bundle = load_bundle(bundle_path)
    matches_file = opts.get(
        "matches_file", matches_file, str(Path(out) / artifacts.MATCHES_JSON)
    )
    survivors = artifacts.read_matches(Path(matches_file), bundle.attribute_vocab)
    temperature = float(opts.get("temperature", temperature, DEFAULT_TEMPERATURE))
    label_set, warnings = build_extended_label_set(bundle, survivors, temperature)
    for warning in warnings:
        click.echo(f"warning: {warning}", err=True)
    W, b = _adapter_params(opts.get("adapter", adapter_dir, None), bundle.dim)
    adapted = adapt(W, b, _target_matrix(bundle))
    predictions = predict_batch(
        adapted, [v.id for v in bundle.target_videos()], label_set
    )
    artifacts.write_predictions(Path(out), predictions)
    rejected = sum(1 for p in predictions if p.is_private)
    click.echo(
        f"predicted {len(predictions)} videos ({rejected} rejected as unknown) -> {out}"
    )


@cli.command("pseudolabel")
@click.option("--out", type=str, default=None)
@click.option("--predictions-file", type=str, default=None)
@click.option("--pseudo-percent", type=float, default=None)
@_CONFIG_OPTION
def pseudolabel_cmd(config_path, out, predictions_file, pseudo_percent):
    """Select the most confident predictions per class."""
    opts = Options(config_path)
    out = opts.get("out", out, None)
    if out is None:
        raise ValidationError("pseudolabel requires --out")
    predictions_file = opts.get(
        "predictions_file",
        predictions_file,
        str(Path(out) / artifacts.PREDICTIONS_JSONL),
    )
    predictions = artifacts.read_predictions(Path(predictions_file))
    k = float(opts.get("pseudo_percent", pseudo_percent, 20.0))
    selected = select_pseudo_labels(predictions, k)
    artifacts.write_pseudolabels(Path(out), selected, k)
    click.echo(
        f"selected {len(selected)} of {len(predictions)} predictions -> {out}"
    )


@cli.command("train")
@click.option("--bundle", "bundle_path", type=str, default=None)
@click.option("--out", type=str, default=None)
@click.option("--pseudolabels-file", type=str, default=None)
@click.option("--matches-file", type=str, default=None)
@click.option("--init-adapter", type=str, default=None)
@click.option("--learning-rate", type=float, default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--batch-size", type=int, default=None)
@click.option("--temperature", type=float, default=None)
@click.option("--label-smoothing", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option(
    "--include-source-batches/--no-include-source-batches",
    "include_source",
    default=None,
)
@_CONFIG_OPTION
def train_cmd(
    config_path,
    bundle_path,
    out,
    pseudolabels_file,
    matches_file,
    init_adapter,
    learning_rate,
    epochs,
    batch_size,
    temperature,
    label_smoothing,
    seed,
    include_source,
):
    """Train the adapter on pseudo-labelled targets (plus source pairs)."""
    opts = Options(config_path)
    bundle_path = opts.get("bundle", bundle_path, None)
    out = opts.get("out", out, None)
    if bundle_path is None or out is None:
        raise ValidationError("train requires --bundle and --out")
    bundle = load_bundle(bundle_path)
    pseudolabels_file = opts.get(
        "pseudolabels_file",
        pseudolabels_file,
        str(Path(out) / artifacts.PSEUDOLABELS_JSON),
    )
    matches_file = opts.get(
        "matches_file", matches_file, str(Path(out) / artifacts.MATCHES_JSON)
    )
    pseudo = artifacts.read_pseudolabels(Path(pseudolabels_file))
    survivors = artifacts.read_matches(Path(matches_file), bundle.attribute_vocab)
    temperature = float(opts.get("temperature", temperature, 0.01))
    label_set, _ = build_extended_label_set(bundle, survivors, temperature)
    config = TrainConfig(
        learning_rate=float(opts.get("learning_rate", learning_rate, 1e-2)),
        epochs=int(opts.get("epochs", epochs, 20)),
        batch_size=int(opts.get("batch_size", batch_size, 32)),
        temperature=temperature,
        label_smoothing=float(opts.get("label_smoothing", label_smoothing, 1e-6)),
        seed=int(opts.get("seed", seed, 0)),
    )
    include_source = bool(opts.get("include_source_batches", include_source, True))

    by_id = {v.id: v for v in bundle.videos}
    rows = []
    labels = []
    for pred in pseudo:
        if pred.video_id not in by_id:
            raise ValidationError(f"pseudo-label for unknown video {pred.video_id!r}")
        if not 0 <= pred.label_index < len(label_set.names):
            raise ValidationError(
                f"pseudo-label index {pred.label_index} outside the label set"
            )
        rows.append(bundle.embedding_of(by_id[pred.video_id]))
        labels.append(pred.label_index)
    if include_source:
        shared_index = {name: i for i, name in enumerate(bundle.shared_names)}
        for video in bundle.source_videos():
            rows.append(bundle.embedding_of(video))
            labels.append(shared_index[video.true_label])
    if len(rows) < 2:
        raise ValidationError(
            f"training needs at least 2 pairs, got {len(rows)}"
        )
    init = _adapter_params(opts.get("init_adapter", init_adapter, None), bundle.dim)
    fitter = LinearAdapter(
        learning_rate=config.learning_rate,
        epochs=config.epochs,
        batch_size=config.batch_size,
        temperature=config.temperature,
        label_smoothing=config.label_smoothing,
        seed=config.seed,
    )
    fitter.fit(
        np.asarray(rows, dtype=np.float64),
        np.asarray(labels, dtype=np.int64),
        label_embeddings=label_set.embeddings,
        init=init,
    )
    artifacts.write_adapter(
        Path(out),
        fitter.W_,
        fitter.b_,
        fitter.loss_trace_,
        {
            "learning_rate": config.learning_rate,
            "epochs": config.epochs,
            "batch_size": config.batch_size,
            "temperature": config.temperature,
            "label_smoothing": config.label_smoothing,
            "seed": config.seed,
        },
    )
    first = fitter.loss_trace_[0] if fitter.loss_trace_ else float("nan")
    last = fitter.loss_trace_[-1] if fitter.loss_trace_ else float("nan")
    click.echo(
        f"trained adapter on {len(rows)} pairs "
        f"(loss {first:.6f} -> {last:.6f}) -> {out}"
    )


@cli.command("evaluate")
@click.option("--bundle", "bundle_path", type=str, default=None)
@click.option("--out", type=str, default=None)
@click.option("--predictions-file", type=str, default=None)
@click.option("--ground-truth", "ground_truth_path", type=str, default=None)
@_CONFIG_OPTION
def evaluate_cmd(config_path, bundle_path, out, predictions_file, ground_truth_path):
    """Score predictions: ALL, OS*, UNK, HOS."""
    opts = Options(config_path)
    bundle_path = opts.get("bundle", bundle_path, None)
    out = opts.get("out", out, None)
    if bundle_path is None or out is None:
        raise ValidationError("evaluate requires --bundle and --out")
    bundle = load_bundle(bundle_path)
    predictions_file = opts.get(
        "predictions_file",
        predictions_file,
        str(Path(out) / artifacts.PREDICTIONS_JSONL),
    )
    predictions = artifacts.read_predictions(Path(predictions_file))
    truth = _load_ground_truth(
        opts.get("ground_truth", ground_truth_path, None), bundle_path
    )
    gt = ground_truth_map(bundle, truth.video_labels if truth else None)
    metrics = evaluate(predictions, gt, bundle.shared_names)
    artifacts.write_metrics(Path(out), metrics)
    click.echo(format_table([("result", metrics)]))


def _pipeline_config(opts: Options, flags: dict) -> PipelineConfig:
    train = TrainConfig(
        learning_rate=float(opts.get("learning_rate", flags["learning_rate"], 1e-2)),
        epochs=int(opts.get("epochs", flags["epochs"], 20)),
        batch_size=int(opts.get("batch_size", flags["batch_size"], 32)),
        temperature=float(opts.get("temperature", flags["temperature"], 0.01)),
        label_smoothing=float(
            opts.get("label_smoothing", flags["label_smoothing"], 1e-6)
        ),
        seed=int(opts.get("seed", flags["seed"], 0)),
    )
    clusters = opts.get("clusters", flags["clusters"], None)
    return PipelineConfig(
        clusters=int(clusters) if clusters is not None else None,
        attributes_per_video=int(opts.get("attributes_per_video", flags["m"], 5)),
        profile_size=int(opts.get("profile_size", flags["t"], 3)),
        argtop_k=int(opts.get("argtop_k", flags["argtop_k"], 20)),
        tfidf_threshold=float(
            opts.get("tfidf_threshold", flags["tfidf_threshold"], 0.5)
        ),
        gamma=float(opts.get("gamma", flags["gamma"], 0.5)),
        temperature=train.temperature,
        pseudo_percent=float(opts.get("pseudo_percent", flags["pseudo_percent"], 20.0)),
        strategy=str(opts.get("strategy", flags.get("strategy"), "discovered")),
        rejection_threshold=float(
            opts.get("rejection_threshold", flags["rejection_threshold"], 0.9)
        ),
        epochs_outer=int(opts.get("epochs_outer", flags["epochs_outer"], 5)),
        include_source_batches=bool(
            opts.get("include_source_batches", flags["include_source"], True)
        ),
        train=train,
        seed=int(opts.get("seed", flags["seed"], 0)),
    )


def _pipeline_options(fn):
    decorators = [
        click.option("--bundle", "bundle_path", type=str, default=None),
        click.option("--out", type=str, default=None),
        click.option("--clusters", type=int, default=None),
        click.option("--attributes-per-video", "-m", "m", type=int, default=None),
        click.option("--profile-size", "-t", "t", type=int, default=None),
        click.option("--argtop-k", type=int, default=None),
        click.option("--tfidf-threshold", type=float, default=None),
        click.option("--gamma", type=float, default=None),
        click.option("--temperature", type=float, default=None),
        click.option("--pseudo-percent", type=float, default=None),
        click.option("--rejection-threshold", type=float, default=None),
        click.option("--epochs-outer", type=int, default=None),
        click.option("--learning-rate", type=float, default=None),
        click.option("--epochs", type=int, default=None),
        click.option("--batch-size", type=int, default=None),
        click.option("--label-smoothing", type=float, default=None),
        click.option("--seed", type=int, default=None),
        click.option(
            "--include-source-batches/--no-include-source-batches",
            "include_source",
            default=None,
        ),
        click.option("--no-train", is_flag=True, default=False),
        click.option("--ground-truth", "ground_truth_path", type=str, default=None),
        _CONFIG_OPTION,
    ]
    for dec in reversed(decorators):
        fn = dec(fn)
    return fn


@cli.command("pipeline")
@click.option(
    "--strategy",
    type=click.Choice(list(STRATEGIES)),
    default=None,
    help="Rejection strategy.",
)
@_pipeline_options
def pipeline_cmd(config_path, bundle_path, out, ground_truth_path, no_train, **flags):
    """Full outer loop: adapt, cluster, discover, match, predict, train."""
    opts = Options(config_path)
    bundle_path = opts.get("bundle", bundle_path, None)
    out = opts.get("out", out, None)
    if bundle_path is None or out is None:
        raise ValidationError("pipeline requires --bundle and --out")
    bundle = load_bundle(bundle_path)
    config = _pipeline_config(opts, flags)
    if no_train:
        config = PipelineConfig(
            **{
                **{
                    f.name: getattr(config, f.name)
                    for f in dataclass_fields(PipelineConfig)
                },
                "epochs_outer": 0,
            }
        )
    truth = _load_ground_truth(
        opts.get("ground_truth", ground_truth_path, None), bundle_path
    )
    result = run_pipeline(bundle, config, truth, out)
    for warning in result.warnings:
        click.echo(f"warning: {warning}", err=True)
    click.echo(format_table([(config.strategy, result.metrics)]))


@cli.command("compare")
@_pipeline_options
def compare_cmd(config_path, bundle_path, out, ground_truth_path, no_train, **flags):
    """Run every rejection strategy and print a comparison table."""
    opts = Options(config_path)
    bundle_path = opts.get("bundle", bundle_path, None)
    out = opts.get("out", out, None)
    if bundle_path is None or out is None:
        raise ValidationError("compare requires --bundle and --out")
    bundle = load_bundle(bundle_path)
    flags["strategy"] = None
    config = _pipeline_config(opts, flags)
    if no_train:
        config = PipelineConfig(
            **{
                **{
                    f.name: getattr(config, f.name)
                    for f in dataclass_fields(PipelineConfig)
                },
                "epochs_outer": 0,
            }
        )
    truth = _load_ground_truth(
        opts.get("ground_truth", ground_truth_path, None), bundle_path
    )
    rows = compare_strategies(bundle, config, truth, out)
    click.echo(format_table(rows))


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 2
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except OpenLabelError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
