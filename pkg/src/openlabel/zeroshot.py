"""Zero-shot open-set prediction over an extended label set.

Videos are scored by cosine against shared label embeddings plus the
surviving candidate embeddings; a video whose argmax lands on a candidate
is rejected as unknown.  Also hosts the two rejection baselines and the
oracle label set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bundle import DatasetBundle, VideoRecord, normalize_rows
from .discovery import AttributeProfile, CandidateLabel, video_attributes
from .errors import (
    DegenerateVector,
    GroundTruthUnavailable,
    ValidationError,
)

DEFAULT_TEMPERATURE = 0.01


def cosine(v: np.ndarray, w: np.ndarray) -> float:
    """Cosine similarity in float64, clamped to [-1, 1]."""
    a = np.asarray(v, dtype=np.float64)
    b = np.asarray(w, dtype=np.float64)
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na <= 1e-12 or nb <= 1e-12:
        raise DegenerateVector(f"cosine of vector with norm {min(na, nb)!r}")
    return float(np.clip(float(a @ b) / (na * nb), -1.0, 1.0))


def softmax_scores(scores: np.ndarray, temperature: float) -> np.ndarray:
    """Temperature softmax with max subtraction, in float64."""
    if temperature <= 0:
        raise ValidationError(f"temperature must be > 0, got {temperature}")
    logits = np.asarray(scores, dtype=np.float64) / temperature
    logits = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(logits)
    return exp / exp.sum(axis=-1, keepdims=True)


def compose_label_embedding(
    profile: AttributeProfile, attribute_embeddings: np.ndarray
) -> np.ndarray:
    """Unit-norm mean of the profile's attribute embedding rows (float64)."""
    if len(profile) == 0:
        raise ValidationError(f"profile for owner {profile.owner!r} is empty")
    rows = attribute_embeddings[list(profile.indices)].astype(np.float64)
    mean = rows.mean(axis=0)
    norm = float(np.linalg.norm(mean))
    if norm <= 1e-12:
        raise DegenerateVector(
            f"attribute mean for owner {profile.owner!r} has norm {norm!r}"
        )
    return mean / norm


@dataclass(frozen=True, slots=True)
class ExtendedLabelSet:
    """Shared labels plus surviving private candidates, ready for scoring.

    ``embeddings`` stacks one unit-norm float64 row per label, shared rows
    first.  ``candidates`` carries the discovery provenance when the
    private labels came from clustering; the oracle set leaves it empty.
    """

    shared_names: tuple[str, ...]
    private_names: tuple[str, ...]
    embeddings: np.ndarray = field(repr=False)
    temperature: float = DEFAULT_TEMPERATURE
    candidates: tuple[CandidateLabel, ...] = ()

    def __post_init__(self) -> None:
        names = list(self.shared_names) + list(self.private_names)
        if len(set(names)) != len(names):
            raise ValidationError("extended label set has duplicate names")
        if not self.shared_names:
            raise ValidationError("extended label set needs shared labels")
        if self.embeddings.shape[0] != len(names):
            raise ValidationError(
                f"{len(names)} labels but {self.embeddings.shape[0]} embedding rows"
            )
        if self.temperature <= 0:
            raise ValidationError(
                f"temperature must be > 0, got {self.temperature}"
            )

    @property
    def num_shared(self) -> int:
        return len(self.shared_names)

    @property
    def names(self) -> tuple[str, ...]:
        return self.shared_names + self.private_names


def build_extended_label_set(
    bundle: DatasetBundle,
    survivors: Sequence[CandidateLabel],
    temperature: float = DEFAULT_TEMPERATURE,
) -> tuple[ExtendedLabelSet, list[str]]:
    """Extended set from a bundle's shared labels and surviving candidates.

    A candidate whose name collides with a shared label or an earlier
    candidate duplicates an existing class, so it is dropped and reported.
    """
    shared = normalize_rows(bundle.shared_label_matrix())
    names = list(bundle.shared_names)
    kept: list[CandidateLabel] = []
    rows: list[np.ndarray] = []
    warnings: list[str] = []
    for cand in survivors:
        if cand.name in names:
            warnings.append(
                f"candidate from cluster {cand.source_cluster} duplicates "
                f"label {cand.name!r}; dropped"
            )
            continue
        names.append(cand.name)
        kept.append(cand)
        rows.append(compose_label_embedding(cand.profile, bundle.attribute_embeddings))
    embeddings = np.vstack([shared] + [r[None, :] for r in rows]) if rows else shared
    label_set = ExtendedLabelSet(
        shared_names=bundle.shared_names,
        private_names=tuple(c.name for c in kept),
        embeddings=embeddings,
        temperature=temperature,
        candidates=tuple(kept),
    )
    return label_set, warnings


def oracle_extend(
    bundle: DatasetBundle,
    private_prototypes: dict[str, np.ndarray] | None,
    temperature: float = DEFAULT_TEMPERATURE,
) -> ExtendedLabelSet:
    """Extended set whose private embeddings are true class prototypes."""
    if not private_prototypes:
        raise GroundTruthUnavailable(
            "oracle label set requires ground-truth private prototypes"
        )
    names = sorted(private_prototypes)
    rows = normalize_rows(np.asarray([private_prototypes[n] for n in names]))
    shared = normalize_rows(bundle.shared_label_matrix())
    return ExtendedLabelSet(
        shared_names=bundle.shared_names,
        private_names=tuple(names),
        embeddings=np.vstack([shared, rows]),
        temperature=temperature,
    )


@dataclass(frozen=True, slots=True)
class Prediction:
    """One video's predicted label and rejection flag."""

    video_id: str
    label_index: int
    label_name: str
    confidence: float
    is_private: bool


def _predict_rows(
    embeddings: np.ndarray, label_rows: np.ndarray, temperature: float
) -> tuple[np.ndarray, np.ndarray]:
    """Argmax indices and their softmax confidences, row per video."""
    vids = np.asarray(embeddings, dtype=np.float64)
    norms = np.linalg.norm(vids, axis=-1)
    if np.any(norms <= 1e-12):
        raise DegenerateVector("video embedding with near-zero norm")
    label_norms = np.linalg.norm(label_rows, axis=-1)
    cos = (vids @ label_rows.T) / (norms[:, None] * label_norms[None, :])
    cos = np.clip(cos, -1.0, 1.0)
    indices = np.argmax(cos, axis=-1)
    probs = softmax_scores(cos, temperature)
    conf = probs[np.arange(len(indices)), indices]
    return indices, conf


def predict_batch(
    embeddings: np.ndarray,
    video_ids: Sequence[str],
    label_set: ExtendedLabelSet,
) -> list[Prediction]:
    """Open-set predictions for a stack of video embeddings."""
    indices, conf = _predict_rows(
        np.atleast_2d(embeddings), label_set.embeddings, label_set.temperature
    )
    names = label_set.names
    return [
        Prediction(
            video_id=video_ids[i],
            label_index=int(indices[i]),
            label_name=names[indices[i]],
            confidence=float(conf[i]),
            is_private=bool(indices[i] >= label_set.num_shared),
        )
        for i in range(len(video_ids))
    ]


def predict_video(
    video: VideoRecord, bundle: DatasetBundle, label_set: ExtendedLabelSet
) -> Prediction:
    return predict_batch(
        bundle.embedding_of(video)[None, :], [video.id], label_set
    )[0]


def baseline_threshold_predict(
    embeddings: np.ndarray,
    video_ids: Sequence[str],
    bundle: DatasetBundle,
    threshold: float,
    temperature: float = DEFAULT_TEMPERATURE,
) -> list[Prediction]:
    """Closed-set argmax over shared labels; reject when max cosine < threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValidationError(f"threshold must lie in [0, 1], got {threshold}")
    vids = np.atleast_2d(np.asarray(embeddings, dtype=np.float64))
    shared = normalize_rows(bundle.shared_label_matrix())
    norms = np.linalg.norm(vids, axis=-1)
    if np.any(norms <= 1e-12):
        raise DegenerateVector("video embedding with near-zero norm")
    cos = np.clip(vids @ shared.T / norms[:, None], -1.0, 1.0)
    indices = np.argmax(cos, axis=-1)
    probs = softmax_scores(cos, temperature)
    names = bundle.shared_names
    out = []
    for i, vid in enumerate(video_ids):
        best = int(indices[i])
        out.append(
            Prediction(
                video_id=vid,
                label_index=best,
                label_name=names[best],
                confidence=float(probs[i, best]),
                is_private=bool(cos[i, best] < threshold),
            )
        )
    return out


def baseline_instance_extension_predict(
    video: VideoRecord,
    bundle: DatasetBundle,
    m: int,
    temperature: float = DEFAULT_TEMPERATURE,
    embedding: np.ndarray | None = None,
) -> Prediction:
    """Extend the label set with the video's own top-m attributes.

    Each attribute becomes a singleton candidate; if the argmax lands on
    one of them the video is rejected as unknown.  A video with no
    attributes degrades to the closed-set argmax.  ``embedding`` overrides
    the bundle row, e.g. with an adapted vector.
    """
    attrs = video_attributes(video, m)
    shared = normalize_rows(bundle.shared_label_matrix())
    k = shared.shape[0]
    if attrs:
        attr_rows = normalize_rows(
            bundle.attribute_embeddings[attrs].astype(np.float64)
        )
        label_rows = np.vstack([shared, attr_rows])
    else:
        label_rows = shared
    if embedding is None:
        embedding = bundle.embedding_of(video)
    indices, conf = _predict_rows(
        np.asarray(embedding)[None, :], label_rows, temperature
    )
    best = int(indices[0])
    if best < k:
        name = bundle.shared_names[best]
        private = False
    else:
        name = bundle.attribute_vocab[attrs[best - k]]
        private = True
    return Prediction(
        video_id=video.id,
        label_index=best,
        label_name=name,
        confidence=float(conf[0]),
        is_private=private,
    )


__all__ = [
    "DEFAULT_TEMPERATURE",
    "ExtendedLabelSet",
    "Prediction",
    "baseline_instance_extension_predict",
    "baseline_threshold_predict",
    "build_extended_label_set",
    "compose_label_embedding",
    "cosine",
    "oracle_extend",
    "predict_batch",
    "predict_video",
    "softmax_scores",
]
