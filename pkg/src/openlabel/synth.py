"""Synthetic bundle generator with known class structure.

Produces a bundle whose classes are quasi-orthogonal unit prototypes plus
Gaussian noise, with per-class salient attribute tokens that are disjoint
across classes.  Every draw comes from one SplitMix64 stream in a fixed
order, so identical (config, seed) pairs yield byte-identical bundles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bundle import SOURCE, TARGET, DatasetBundle, LabelEntry, VideoRecord, l2_normalize
from .errors import RejectionExceeded, ValidationError
from .rng import SplitMix64

MAX_PAIRWISE_COS = 0.3


@dataclass(slots=True)
class SynthConfig:
    """Knobs for the synthetic generator.

    ``t_true`` salient attributes are assigned to each class, disjoint
    across classes; each frame lists them most-confident-first with
    distractor tokens interleaved at probability ``p_distract``.
    """

    shared_classes: int
    private_classes: int
    videos_per_class: int
    dim: int = 64
    frames_per_video: int = 8
    attributes_per_frame: int = 5
    sigma: float = 0.15
    salient_per_class: int = 3
    distractor_vocab: int = 50
    p_distract: float = 0.3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise ValidationError(f"dim must be >= 2, got {self.dim}")
        if self.shared_classes < 2:
            raise ValidationError(
                f"shared_classes must be >= 2, got {self.shared_classes}"
            )
        if self.private_classes < 1:
            raise ValidationError(
                f"private_classes must be >= 1, got {self.private_classes}"
            )
        if self.videos_per_class < 2:
            raise ValidationError(
                f"videos_per_class must be >= 2, got {self.videos_per_class}"
            )
        if self.frames_per_video < 1:
            raise ValidationError(
                f"frames_per_video must be >= 1, got {self.frames_per_video}"
            )
        if self.attributes_per_frame < 1:
            raise ValidationError(
                f"attributes_per_frame must be >= 1, got {self.attributes_per_frame}"
            )
        if not 1 <= self.salient_per_class <= self.attributes_per_frame:
            raise ValidationError(
                "salient_per_class must lie in [1, attributes_per_frame], got "
                f"{self.salient_per_class}"
            )
        if not self.sigma > 0:
            raise ValidationError(f"sigma must be > 0, got {self.sigma}")
        if not 0 <= self.p_distract < 1:
            raise ValidationError(
                f"p_distract must lie in [0, 1), got {self.p_distract}"
            )
        if self.distractor_vocab < 0:
            raise ValidationError(
                f"distractor_vocab must be >= 0, got {self.distractor_vocab}"
            )
        if self.p_distract > 0 and self.distractor_vocab == 0:
            raise ValidationError(
                "p_distract > 0 requires a nonempty distractor vocabulary"
            )


@dataclass(slots=True)
class GroundTruth:
    """Held-out truth for a synthetic bundle: labels, salient sets, prototypes."""

    video_labels: dict[str, str]
    salient_attributes: dict[str, tuple[int, ...]]
    private_prototypes: dict[str, np.ndarray] = field(repr=False)

    def to_json_dict(self) -> dict:
        return {
            "videos": dict(self.video_labels),
            "salient": {k: list(v) for k, v in self.salient_attributes.items()},
            "private_prototypes": {
                k: [float(x) for x in v] for k, v in self.private_prototypes.items()
            },
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "GroundTruth":
        if not isinstance(obj, dict) or "videos" not in obj:
            raise ValidationError("ground truth file must map videos to classes")
        return cls(
            video_labels={str(k): str(v) for k, v in obj["videos"].items()},
            salient_attributes={
                str(k): tuple(int(i) for i in v)
                for k, v in obj.get("salient", {}).items()
            },
            private_prototypes={
                str(k): np.asarray(v, dtype=np.float32)
                for k, v in obj.get("private_prototypes", {}).items()
            },
        )


def _sample_prototypes(rng: SplitMix64, count: int, dim: int) -> np.ndarray:
    """Unit prototypes with pairwise |cosine| < 0.3, by rejection."""
    budget = 10 * count * count
    attempts = 0
    chosen: list[np.ndarray] = []
    while len(chosen) < count:
        if attempts >= budget:
            raise RejectionExceeded(
                f"could not place {count} prototypes with pairwise |cos| < "
                f"{MAX_PAIRWISE_COS} in dim {dim} within {budget} attempts"
            )
        attempts += 1
        cand = rng.unit_vector(dim)
        if all(abs(float(cand @ p)) < MAX_PAIRWISE_COS for p in chosen):
            chosen.append(cand)
    return np.asarray(chosen, dtype=np.float64)


def _noisy_unit(rng: SplitMix64, base: np.ndarray, sigma: float) -> np.ndarray:
    noise = rng.gaussians(base.shape[0]) * sigma
    return l2_normalize(base + noise)


def _make_frame(
    rng: SplitMix64,
    salient: tuple[int, ...],
    distractor_indices: range,
    slots: int,
    p_distract: float,
) -> tuple[int, ...]:
    # Salient tokens keep their confidence order; each slot may be stolen by
    # a distractor with probability p_distract, and trailing slots fill the
    # same way until the coin says stop.
    frame: list[int] = []
    si = 0
    have_distractors = len(distractor_indices) > 0
    while len(frame) < slots:
        steal = have_distractors and rng.uniform() < p_distract
        if steal:
            frame.append(distractor_indices[rng.randint(len(distractor_indices))])
        elif si < len(salient):
            frame.append(salient[si])
            si += 1
        else:
            break
    return tuple(frame)


def generate(config: SynthConfig) -> tuple[DatasetBundle, GroundTruth]:
    """Build a synthetic bundle plus its ground truth."""
    rng = SplitMix64(config.seed)
    k, m_priv = config.shared_classes, config.private_classes
    total_classes = k + m_priv
    dim = config.dim

    prototypes = _sample_prototypes(rng, total_classes, dim)
    shared_names = [f"shared_{c:02d}" for c in range(k)]
    private_names = [f"private_{j:02d}" for j in range(m_priv)]
    class_names = shared_names + private_names

    # Vocabulary: per-class salient tokens first, then shared distractors.
    vocab: list[str] = []
    salient_by_class: dict[str, tuple[int, ...]] = {}
    for c, name in enumerate(class_names):
        indices = []
        for j in range(config.salient_per_class):
            indices.append(len(vocab))
            vocab.append(f"cue_{c:02d}_{j:02d}")
        salient_by_class[name] = tuple(indices)
    distractor_start = len(vocab)
    for i in range(config.distractor_vocab):
        vocab.append(f"filler_{i:02d}")
    distractor_indices = range(distractor_start, len(vocab))

    attribute_rows = np.zeros((len(vocab), dim), dtype=np.float64)
    for c, name in enumerate(class_names):
        for idx in salient_by_class[name]:
            attribute_rows[idx] = _noisy_unit(rng, prototypes[c], config.sigma / 2.0)
    for idx in distractor_indices:
        attribute_rows[idx] = rng.unit_vector(dim)

    videos: list[VideoRecord] = []
    embeddings: list[np.ndarray] = []
    video_labels: dict[str, str] = {}

    def add_video(vid: str, domain: str, class_index: int, labelled: bool) -> None:
        emb = _noisy_unit(rng, prototypes[class_index], config.sigma)
        frames = tuple(
            _make_frame(
                rng,
                salient_by_class[class_names[class_index]],
                distractor_indices,
                config.attributes_per_frame,
                config.p_distract,
            )
            for _ in range(config.frames_per_video)
        )
        videos.append(
            VideoRecord(
                id=vid,
                domain=domain,
                embedding_index=len(embeddings),
                frames=frames,
                true_label=class_names[class_index] if labelled else None,
            )
        )
        embeddings.append(emb)
        video_labels[vid] = class_names[class_index]

    for c in range(k):
        for i in range(config.videos_per_class):
            add_video(f"src_{class_names[c]}_{i:03d}", SOURCE, c, labelled=True)
    for c in range(total_classes):
        for i in range(config.videos_per_class):
            add_video(f"tgt_{class_names[c]}_{i:03d}", TARGET, c, labelled=True)

    bundle = DatasetBundle(
        dim=dim,
        shared_labels=tuple(
            LabelEntry(name=shared_names[c], embedding_index=c) for c in range(k)
        ),
        attribute_vocab=tuple(vocab),
        videos=tuple(videos),
        video_embeddings=np.asarray(embeddings, dtype=np.float32),
        label_embeddings=prototypes[:k].astype(np.float32),
        attribute_embeddings=attribute_rows.astype(np.float32),
    )
    truth = GroundTruth(
        video_labels=video_labels,
        salient_attributes=salient_by_class,
        private_prototypes={
            private_names[j]: prototypes[k + j].astype(np.float32)
            for j in range(m_priv)
        },
    )
    return bundle, truth


__all__ = ["GroundTruth", "SynthConfig", "generate"]
