"""On-disk formats for per-stage artifacts.

Every writer emits deterministic bytes for identical inputs: fixed key
order, no timestamps.  Fixed filenames let each CLI stage run from the
previous stage's output directory.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .bundle import read_matrix, write_matrix
from .cluster import KMeans
from .discovery import AttributeProfile, CandidateLabel
from .errors import IoError, ValidationError
from .matching import PrunedCandidate, SimilarityMatrix
from .metrics import OpenSetMetrics
from .zeroshot import Prediction

CLUSTERS_JSON = "clusters.json"
CENTROIDS_BIN = "centroids.bin"
CANDIDATES_JSON = "candidates.json"
MATCHES_JSON = "matches.json"
PREDICTIONS_JSONL = "predictions.jsonl"
PSEUDOLABELS_JSON = "pseudolabels.json"
ADAPTER_JSON = "adapter.json"
ADAPTER_W_BIN = "adapter_W.bin"
ADAPTER_B_BIN = "adapter_b.bin"
METRICS_JSON = "metrics.json"
GROUND_TRUTH_JSON = "ground_truth.json"
COMPARISON_JSON = "comparison.json"


def write_json(path: Path, obj) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            json.dump(obj, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IoError(f"failed to write {path}: {exc}") from exc


def read_json(path: Path):
    if not path.is_file():
        raise ValidationError(f"artifact not found: {path}")
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise IoError(f"failed to read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON: {exc}") from exc


def write_clusters(
    out: Path, model: KMeans, video_ids: Sequence[str]
) -> None:
    assignments = {vid: int(c) for vid, c in zip(video_ids, model.labels_)}
    write_json(
        out / CLUSTERS_JSON,
        {
            "num_clusters": int(model.n_clusters),
            "seed": int(model.seed),
            "max_iter": int(model.max_iter),
            "iterations_run": int(model.n_iter_),
            "inertia": float(model.inertia_),
            "assignments": assignments,
        },
    )
    write_matrix(out / CENTROIDS_BIN, model.cluster_centers_)


def read_clusters(path: Path) -> tuple[dict[str, int], int]:
    """Assignments and cluster count from a clusters.json file."""
    obj = read_json(path)
    for key in ("num_clusters", "assignments"):
        if key not in obj:
            raise ValidationError(f"{path}: missing key {key!r}")
    return (
        {str(k): int(v) for k, v in obj["assignments"].items()},
        int(obj["num_clusters"]),
    )


def candidate_to_json(cand: CandidateLabel, vocab: Sequence[str]) -> dict:
    return {
        "cluster": cand.source_cluster,
        "name": cand.name,
        "attributes": [
            {"token": vocab[idx], "score": float(score)}
            for idx, score in cand.profile.entries
        ],
    }


def candidate_from_json(obj: dict, vocab: Sequence[str]) -> CandidateLabel:
    token_index = {token: i for i, token in enumerate(vocab)}
    entries = []
    for attr in obj["attributes"]:
        token = attr["token"]
        if token not in token_index:
            raise ValidationError(f"candidate token {token!r} not in vocabulary")
        entries.append((token_index[token], float(attr["score"])))
    profile = AttributeProfile(owner=int(obj["cluster"]), entries=tuple(entries))
    return CandidateLabel(
        name=str(obj["name"]), profile=profile, source_cluster=int(obj["cluster"])
    )


def write_candidates(
    out: Path, candidates: Sequence[CandidateLabel], vocab: Sequence[str]
) -> None:
    write_json(
        out / CANDIDATES_JSON, [candidate_to_json(c, vocab) for c in candidates]
    )


def read_candidates(path: Path, vocab: Sequence[str]) -> list[CandidateLabel]:
    obj = read_json(path)
    if not isinstance(obj, list):
        raise ValidationError(f"{path}: expected a JSON list of candidates")
    return [candidate_from_json(entry, vocab) for entry in obj]


def write_matches(
    out: Path,
    matrix: SimilarityMatrix,
    gamma: float,
    survivors: Sequence[CandidateLabel],
    pruned: Sequence[PrunedCandidate],
    vocab: Sequence[str],
) -> None:
    write_json(
        out / MATCHES_JSON,
        {
            "gamma": float(gamma),
            "row_labels": list(matrix.row_labels),
            "col_clusters": [int(c) for c in matrix.col_clusters],
            "similarity": [[float(v) for v in row] for row in matrix.values],
            "pruned": [
                {
                    "cluster": p.candidate.source_cluster,
                    "matched_label": p.matched_label,
                    "score": float(p.score),
                }
                for p in pruned
            ],
            "survivors": [candidate_to_json(c, vocab) for c in survivors],
        },
    )


def read_matches(path: Path, vocab: Sequence[str]) -> list[CandidateLabel]:
    """Surviving candidates recorded in a matches.json file."""
    obj = read_json(path)
    if "survivors" not in obj:
        raise ValidationError(f"{path}: missing key 'survivors'")
    return [candidate_from_json(entry, vocab) for entry in obj["survivors"]]


def prediction_to_json(pred: Prediction) -> dict:
    return {
        "video_id": pred.video_id,
        "label_index": pred.label_index,
        "label_name": pred.label_name,
        "confidence": pred.confidence,
        "is_private": pred.is_private,
    }


def write_predictions(out: Path, predictions: Sequence[Prediction]) -> None:
    path = out / PREDICTIONS_JSONL
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as fh:
            for pred in predictions:
                fh.write(json.dumps(prediction_to_json(pred)))
                fh.write("\n")
    except OSError as exc:
        raise IoError(f"failed to write {path}: {exc}") from exc


def read_predictions(path: Path) -> list[Prediction]:
    if not path.is_file():
        raise ValidationError(f"artifact not found: {path}")
    predictions = []
    for i, line in enumerate(path.read_text().splitlines()):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}:{i + 1}: invalid JSON: {exc}") from exc
        predictions.append(
            Prediction(
                video_id=str(obj["video_id"]),
                label_index=int(obj["label_index"]),
                label_name=str(obj["label_name"]),
                confidence=float(obj["confidence"]),
                is_private=bool(obj["is_private"]),
            )
        )
    return predictions


def write_pseudolabels(
    out: Path, selected: Sequence[Prediction], k_percent: float
) -> None:
    write_json(
        out / PSEUDOLABELS_JSON,
        {
            "k_percent": float(k_percent),
            "selected": [prediction_to_json(p) for p in selected],
        },
    )


def read_pseudolabels(path: Path) -> list[Prediction]:
    obj = read_json(path)
    if "selected" not in obj:
        raise ValidationError(f"{path}: missing key 'selected'")
    return [
        Prediction(
            video_id=str(p["video_id"]),
            label_index=int(p["label_index"]),
            label_name=str(p["label_name"]),
            confidence=float(p["confidence"]),
            is_private=bool(p["is_private"]),
        )
        for p in obj["selected"]
    ]


def write_adapter(
    out: Path, W: np.ndarray, b: np.ndarray, loss_trace: Sequence[float], config: dict
) -> None:
    write_matrix(out / ADAPTER_W_BIN, np.asarray(W))
    write_matrix(out / ADAPTER_B_BIN, np.asarray(b)[None, :])
    write_json(
        out / ADAPTER_JSON,
        {
            "dim": int(np.asarray(W).shape[0]),
            "loss_trace": [float(x) for x in loss_trace],
            "config": config,
        },
    )


def read_adapter(path: Path) -> tuple[np.ndarray, np.ndarray]:
    """(W, b) from an adapter checkpoint directory."""
    W = read_matrix(path / ADAPTER_W_BIN).astype(np.float64)
    b_mat = read_matrix(path / ADAPTER_B_BIN).astype(np.float64)
    if W.shape[0] != W.shape[1]:
        raise ValidationError(f"adapter W must be square, got {W.shape}")
    if b_mat.shape != (1, W.shape[0]):
        raise ValidationError(
            f"adapter b has shape {b_mat.shape}, expected (1, {W.shape[0]})"
        )
    return W, b_mat[0]


def write_metrics(out: Path, metrics: OpenSetMetrics) -> None:
    write_json(out / METRICS_JSON, metrics.to_json_dict())


__all__ = [
    "ADAPTER_B_BIN",
    "ADAPTER_JSON",
    "ADAPTER_W_BIN",
    "CANDIDATES_JSON",
    "CENTROIDS_BIN",
    "CLUSTERS_JSON",
    "COMPARISON_JSON",
    "GROUND_TRUTH_JSON",
    "MATCHES_JSON",
    "METRICS_JSON",
    "PREDICTIONS_JSONL",
    "PSEUDOLABELS_JSON",
    "candidate_from_json",
    "read_json",
    "write_json",
    "candidate_to_json",
    "prediction_to_json",
    "read_adapter",
    "read_candidates",
    "read_clusters",
    "read_matches",
    "read_matrix",
    "read_predictions",
    "read_pseudolabels",
    "write_adapter",
    "write_candidates",
    "write_clusters",
    "write_matches",
    "write_matrix",
    "write_metrics",
    "write_predictions",
    "write_pseudolabels",
]
