"""End-to-end training loop: adapt, cluster, discover, match, predict,
pseudo-label, train, and finally evaluate.

Each outer epoch re-clusters the freshly adapted target embeddings, so
label discovery and adapter training improve together.  All randomness
derives from one master stream seeded by the pipeline seed: per epoch it
yields a clustering seed, then a training seed, in that order.
"""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import artifacts
from .adapter import LinearAdapter, TrainConfig, adapt, identity_params
from .bundle import DatasetBundle, normalize_rows
from .cluster import KMeans
from .discovery import discover_candidates, source_profiles
from .errors import GroundTruthUnavailable, OpenLabelError, ValidationError
from .matching import build_similarity_matrix, match_and_prune
from .metrics import OpenSetMetrics, evaluate, ground_truth_map
from .pseudolabel import select_pseudo_labels
from .rng import SplitMix64
from .synth import GroundTruth
from .zeroshot import (
    ExtendedLabelSet,
    Prediction,
    baseline_instance_extension_predict,
    baseline_threshold_predict,
    build_extended_label_set,
    oracle_extend,
    predict_batch,
)

STRATEGY_DISCOVERED = "discovered"
STRATEGY_THRESHOLD = "threshold"
STRATEGY_INSTANCE = "instance"
STRATEGY_ORACLE = "oracle"
STRATEGIES = (
    STRATEGY_DISCOVERED,
    STRATEGY_THRESHOLD,
    STRATEGY_INSTANCE,
    STRATEGY_ORACLE,
)


@dataclass(slots=True)
class PipelineConfig:
    """Everything a pipeline run depends on besides the bundle itself.

    ``clusters`` defaults to twice the shared-class count at run time and
    should be overridden per experiment.  ``profile_size`` (t) and
    ``attributes_per_video`` (m) control discovery; ``gamma`` prunes
    candidate rediscoveries; ``rejection_threshold`` only matters for the
    threshold strategy.
    """

    clusters: int | None = None
    attributes_per_video: int = 5
    profile_size: int = 3
    argtop_k: int = 20
    tfidf_threshold: float = 0.5
    gamma: float = 0.5
    temperature: float = 0.01
    pseudo_percent: float = 20.0
    strategy: str = STRATEGY_DISCOVERED
    rejection_threshold: float = 0.9
    epochs_outer: int = 5
    include_source_batches: bool = True
    train: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.clusters is not None and self.clusters < 1:
            raise ValidationError(f"clusters must be >= 1, got {self.clusters}")
        if self.attributes_per_video < 1:
            raise ValidationError(
                f"attributes_per_video must be >= 1, got {self.attributes_per_video}"
            )
        if self.profile_size < 1:
            raise ValidationError(
                f"profile_size must be >= 1, got {self.profile_size}"
            )
        if self.argtop_k < 1:
            raise ValidationError(f"argtop_k must be >= 1, got {self.argtop_k}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValidationError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.temperature <= 0:
            raise ValidationError(
                f"temperature must be > 0, got {self.temperature}"
            )
        if not 0 < self.pseudo_percent <= 100:
            raise ValidationError(
                f"pseudo_percent must lie in (0, 100], got {self.pseudo_percent}"
            )
        if self.strategy not in STRATEGIES:
            raise ValidationError(
                f"strategy must be one of {STRATEGIES}, got {self.strategy!r}"
            )
        if not 0.0 <= self.rejection_threshold <= 1.0:
            raise ValidationError(
                f"rejection_threshold must lie in [0, 1], got {self.rejection_threshold}"
            )
        if self.epochs_outer < 0:
            raise ValidationError(
                f"epochs_outer must be >= 0, got {self.epochs_outer}"
            )

    def effective_clusters(self, num_shared: int) -> int:
        return self.clusters if self.clusters is not None else 2 * num_shared


@dataclass(slots=True)
class PipelineResult:
    metrics: OpenSetMetrics
    predictions: list[Prediction]
    label_set: ExtendedLabelSet | None
    W: np.ndarray
    b: np.ndarray
    loss_traces: list[list[float]]
    warnings: list[str]


@contextmanager
def _stage(name: str, epoch: int | str):
    try:
        yield
    except OpenLabelError as exc:
        exc.args = (f"epoch {epoch}, stage {name}: {exc}",)
        raise


def _discover_label_set(
    bundle: DatasetBundle,
    adapted: np.ndarray,
    config: PipelineConfig,
    kmeans_seed: int,
    epoch: int | str,
    out: Path | None,
    warnings: list[str],
) -> ExtendedLabelSet:
    targets = bundle.target_videos()
    k = config.effective_clusters(bundle.num_shared)
    with _stage("cluster", epoch):
        model = KMeans(n_clusters=k, seed=kmeans_seed).fit(adapted)
    with _stage("discover", epoch):
        candidates, skip_warnings = discover_candidates(
            targets,
            model.labels_,
            k,
            bundle.attribute_vocab,
            config.attributes_per_video,
            config.profile_size,
            config.argtop_k,
            config.tfidf_threshold,
        )
        warnings.extend(skip_warnings)
        src_profiles = source_profiles(
            bundle.source_videos(),
            bundle.shared_names,
            config.attributes_per_video,
            config.profile_size,
            config.argtop_k,
            config.tfidf_threshold,
        )
    with _stage("match", epoch):
        matrix = build_similarity_matrix(
            src_profiles, bundle.shared_names, candidates
        )
        survivors, pruned = match_and_prune(matrix, config.gamma, candidates)
        label_set, drop_warnings = build_extended_label_set(
            bundle, survivors, config.temperature
        )
        warnings.extend(drop_warnings)
    if out is not None:
        artifacts.write_clusters(out, model, [v.id for v in targets])
        artifacts.write_candidates(out, candidates, bundle.attribute_vocab)
        artifacts.write_matches(
            out, matrix, config.gamma, survivors, pruned, bundle.attribute_vocab
        )
    return label_set


def _predict(
    bundle: DatasetBundle,
    adapted: np.ndarray,
    config: PipelineConfig,
    label_set: ExtendedLabelSet | None,
    epoch: int | str,
) -> list[Prediction]:
    targets = bundle.target_videos()
    ids = [v.id for v in targets]
    with _stage("predict", epoch):
        if config.strategy in (STRATEGY_DISCOVERED, STRATEGY_ORACLE):
            assert label_set is not None
            return predict_batch(adapted, ids, label_set)
        if config.strategy == STRATEGY_THRESHOLD:
            return baseline_threshold_predict(
                adapted,
                ids,
                bundle,
                config.rejection_threshold,
                config.temperature,
            )
        return [
            baseline_instance_extension_predict(
                video,
                bundle,
                config.attributes_per_video,
                config.temperature,
                embedding=adapted[i],
            )
            for i, video in enumerate(targets)
        ]


def _training_pairs(
    bundle: DatasetBundle,
    config: PipelineConfig,
    pseudo: list[Prediction],
    label_set: ExtendedLabelSet | None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(X, y, label_embeddings) for one adapter fit."""
    if config.strategy in (STRATEGY_DISCOVERED, STRATEGY_ORACLE):
        assert label_set is not None
        label_matrix = label_set.embeddings
    else:
        label_matrix = normalize_rows(bundle.shared_label_matrix())
    by_id = {v.id: v for v in bundle.videos}
    rows = []
    labels = []
    for pred in pseudo:
        rows.append(bundle.embedding_of(by_id[pred.video_id]))
        labels.append(pred.label_index)
    if config.include_source_batches:
        shared_index = {name: i for i, name in enumerate(bundle.shared_names)}
        for video in bundle.source_videos():
            rows.append(bundle.embedding_of(video))
            labels.append(shared_index[video.true_label])
    if not rows:
        return (
            np.zeros((0, bundle.dim)),
            np.zeros((0,), dtype=np.int64),
            label_matrix,
        )
    return (
        np.asarray(rows, dtype=np.float64),
        np.asarray(labels, dtype=np.int64),
        label_matrix,
    )


def run_pipeline(
    bundle: DatasetBundle,
    config: PipelineConfig,
    ground_truth: GroundTruth | None = None,
    out_dir: str | Path | None = None,
) -> PipelineResult:
    """Run the outer loop and evaluate the final predictions.

    With ``epochs_outer`` 0 the adapter stays the identity and the run is
    a single discover-predict-evaluate pass.  Artifacts for each epoch
    land under ``out_dir`` when given, final metrics at its root.
    """
    out = Path(out_dir) if out_dir is not None else None
    targets = bundle.target_videos()
    target_matrix = np.asarray(
        [bundle.embedding_of(v) for v in targets], dtype=np.float64
    )
    master = SplitMix64(config.seed)
    W, b = identity_params(bundle.dim)
    warnings: list[str] = []
    loss_traces: list[list[float]] = []

    oracle_set: ExtendedLabelSet | None = None
    if config.strategy == STRATEGY_ORACLE:
        with _stage("oracle", "setup"):
            oracle_set = oracle_extend(
                bundle,
                ground_truth.private_prototypes if ground_truth else None,
                config.temperature,
            )

    for epoch in range(config.epochs_outer):
        kmeans_seed = master.next_u64()
        train_seed = master.next_u64()
        epoch_out = out / f"epoch_{epoch:02d}" if out is not None else None
        with _stage("adapt", epoch):
            adapted = adapt(W, b, target_matrix)
        if config.strategy == STRATEGY_DISCOVERED:
            label_set = _discover_label_set(
                bundle, adapted, config, kmeans_seed, epoch, epoch_out, warnings
            )
        else:
            label_set = oracle_set
        predictions = _predict(bundle, adapted, config, label_set, epoch)
        with _stage("pseudolabel", epoch):
            pool = predictions
            if config.strategy in (STRATEGY_THRESHOLD, STRATEGY_INSTANCE):
                pool = [p for p in predictions if not p.is_private]
            pseudo = select_pseudo_labels(pool, config.pseudo_percent) if pool else []
        x, y, label_matrix = _training_pairs(bundle, config, pseudo, label_set)
        if epoch_out is not None:
            artifacts.write_predictions(epoch_out, predictions)
            artifacts.write_pseudolabels(epoch_out, pseudo, config.pseudo_percent)
        if len(x) >= 2 and config.train.epochs > 0:
            with _stage("train", epoch):
                train_config = replace(config.train, seed=train_seed)
                fitter = LinearAdapter(
                    learning_rate=train_config.learning_rate,
                    epochs=train_config.epochs,
                    batch_size=train_config.batch_size,
                    temperature=train_config.temperature,
                    label_smoothing=train_config.label_smoothing,
                    seed=train_config.seed,
                )
                fitter.fit(x, y, label_embeddings=label_matrix, init=(W, b))
                W, b = fitter.W_, fitter.b_
                loss_traces.append(fitter.loss_trace_)
                if epoch_out is not None:
                    artifacts.write_adapter(
                        epoch_out,
                        W,
                        b,
                        fitter.loss_trace_,
                        {
                            "learning_rate": train_config.learning_rate,
                            "epochs": train_config.epochs,
                            "batch_size": train_config.batch_size,
                            "temperature": train_config.temperature,
                            "label_smoothing": train_config.label_smoothing,
                            "seed": train_config.seed,
                        },
                    )
        else:
            warnings.append(f"epoch {epoch}: too few training pairs, adapter unchanged")

    # Final pass with the trained adapter.
    final_out = out / "final" if out is not None else None
    kmeans_seed = master.next_u64()
    with _stage("adapt", "final"):
        adapted = adapt(W, b, target_matrix)
    if config.strategy == STRATEGY_DISCOVERED:
        label_set = _discover_label_set(
            bundle, adapted, config, kmeans_seed, "final", final_out, warnings
        )
    else:
        label_set = oracle_set
    predictions = _predict(bundle, adapted, config, label_set, "final")
    if final_out is not None:
        artifacts.write_predictions(final_out, predictions)

    with _stage("evaluate", "final"):
        gt = ground_truth_map(
            bundle, ground_truth.video_labels if ground_truth else None
        )
        metrics = evaluate(predictions, gt, bundle.shared_names)
    if out is not None:
        artifacts.write_metrics(out, metrics)
    return PipelineResult(
        metrics=metrics,
        predictions=predictions,
        label_set=label_set,
        W=W,
        b=b,
        loss_traces=loss_traces,
        warnings=warnings,
    )


def compare_strategies(
    bundle: DatasetBundle,
    config: PipelineConfig,
    ground_truth: GroundTruth | None = None,
    out_dir: str | Path | None = None,
) -> list[tuple[str, OpenSetMetrics | None]]:
    """Run every rejection strategy on the same bundle and seed.

    The oracle row is None when no ground truth is available.  Rows come
    back in a fixed order for table rendering.
    """
    out = Path(out_dir) if out_dir is not None else None
    rows: list[tuple[str, OpenSetMetrics | None]] = []
    for strategy in STRATEGIES:
        run_config = replace(config, strategy=strategy)
        sub_out = out / strategy if out is not None else None
        try:
            result = run_pipeline(bundle, run_config, ground_truth, sub_out)
        except GroundTruthUnavailable:
            rows.append((strategy, None))
            continue
        rows.append((strategy, result.metrics))
    if out is not None:
        artifacts.write_json(
            out / artifacts.COMPARISON_JSON,
            {
                "rows": [
                    {
                        "strategy": name,
                        "metrics": m.to_json_dict() if m is not None else None,
                    }
                    for name, m in rows
                ]
            },
        )
    return rows


__all__ = [
    "STRATEGIES",
    "PipelineConfig",
    "PipelineResult",
    "compare_strategies",
    "run_pipeline",
]
