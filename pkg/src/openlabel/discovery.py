"""Attribute profiles and candidate label names from grouped videos.

Groups (source classes or target clusters) become bag-of-attribute
documents; tf-idf over the group corpus picks each group's most
distinctive attributes; a candidate label is those attribute tokens
joined by single spaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Hashable, Sequence

from .bundle import VideoRecord
from .errors import EmptyDocument, ValidationError

Owner = Hashable


@dataclass(frozen=True, slots=True)
class AttributeDocument:
    """Bag of attribute counts for one group of videos."""

    owner: Owner
    counts: dict[int, int]

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True, slots=True)
class AttributeProfile:
    """Ordered distinctive attributes for one group: (index, score) pairs."""

    owner: Owner
    entries: tuple[tuple[int, float], ...]

    @property
    def indices(self) -> tuple[int, ...]:
        return tuple(idx for idx, _ in self.entries)

    def name(self, vocab: Sequence[str]) -> str:
        return " ".join(vocab[idx] for idx in self.indices)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True, slots=True)
class CandidateLabel:
    """A discovered class-name candidate built from a cluster's profile."""

    name: str
    profile: AttributeProfile
    source_cluster: int


def video_attributes(record: VideoRecord, m: int) -> list[int]:
    """Top-m distinct attribute indices for one video.

    Ranked by frequency across frames (descending), then by the best
    (lowest) within-frame rank, then by vocabulary index.
    """
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    counts: dict[int, int] = {}
    best_rank: dict[int, int] = {}
    for frame in record.frames:
        for rank, attr in enumerate(frame):
            counts[attr] = counts.get(attr, 0) + 1
            if rank < best_rank.get(attr, len(frame) + 1):
                best_rank[attr] = rank
    ordered = sorted(counts, key=lambda a: (-counts[a], best_rank[a], a))
    return ordered[:m]


def _owner_sort_key(owner: Owner):
    return (isinstance(owner, str), owner)


def build_documents(
    videos: Sequence[VideoRecord],
    owners: Sequence[Owner],
    m: int,
    all_owners: Sequence[Owner] | None = None,
) -> list[AttributeDocument]:
    """One document per owner; counts tally each member video's top-m list.

    ``owners`` aligns with ``videos``.  ``all_owners`` forces documents to
    exist (possibly empty) for owners with no member videos.
    """
    if len(videos) != len(owners):
        raise ValidationError(
            f"{len(videos)} videos but {len(owners)} owner assignments"
        )
    counts: dict[Owner, dict[int, int]] = {}
    if all_owners is not None:
        for owner in all_owners:
            counts[owner] = {}
    for video, owner in zip(videos, owners):
        doc = counts.setdefault(owner, {})
        for attr in video_attributes(video, m):
            doc[attr] = doc.get(attr, 0) + 1
    return [
        AttributeDocument(owner=owner, counts=counts[owner])
        for owner in sorted(counts, key=_owner_sort_key)
    ]


def tfidf_scores(
    documents: Sequence[AttributeDocument],
) -> dict[tuple[Owner, int], float]:
    """tf-idf per (document owner, attribute) over one corpus.

    tf(t, d) = count / total counts in d; idf(t) = ln(N / document
    frequency).  Every attribute present in a document gets an entry,
    even when the score is exactly 0; absent attributes get none.
    """
    n_docs = len(documents)
    if n_docs == 0:
        raise ValidationError("tfidf needs at least one document")
    doc_freq: dict[int, int] = {}
    for doc in documents:
        for attr in doc.counts:
            doc_freq[attr] = doc_freq.get(attr, 0) + 1
    scores: dict[tuple[Owner, int], float] = {}
    for doc in documents:
        total = doc.total()
        for attr, count in doc.counts.items():
            tf = count / total
            idf = math.log(n_docs / doc_freq[attr])
            scores[(doc.owner, attr)] = tf * idf
    return scores


def filter_profile(
    document: AttributeDocument,
    scores: dict[tuple[Owner, int], float],
    threshold: float,
    t: int,
    argtop_k: int = 20,
) -> AttributeProfile:
    """Distinctive profile of a document: up to t attributes in score order.

    Only the document's argtop_k most frequent attributes are considered.
    Attributes scoring at or above the threshold are kept, ordered by
    score descending, then raw count descending, then vocabulary index.
    If none survive the threshold, the top t of the considered set by the
    same ordering are kept instead, so a nonempty document never produces
    an empty profile.
    """
    if t < 1:
        raise ValidationError(f"t must be >= 1, got {t}")
    if argtop_k < 1:
        raise ValidationError(f"argtop_k must be >= 1, got {argtop_k}")
    if not document.counts:
        raise EmptyDocument(f"document for owner {document.owner!r} has no counts")
    frequent = sorted(
        document.counts, key=lambda a: (-document.counts[a], a)
    )[:argtop_k]
    def order_key(attr: int):
        return (
            -scores[(document.owner, attr)],
            -document.counts[attr],
            attr,
        )
    ranked = sorted(frequent, key=order_key)
    kept = [a for a in ranked if scores[(document.owner, a)] >= threshold]
    if not kept:
        kept = ranked
    kept = kept[:t]
    return AttributeProfile(
        owner=document.owner,
        entries=tuple((a, scores[(document.owner, a)]) for a in kept),
    )


def discover_candidates(
    videos: Sequence[VideoRecord],
    assignments: Sequence[int],
    num_clusters: int,
    vocab: Sequence[str],
    m: int,
    t: int,
    argtop_k: int = 20,
    threshold: float = 0.5,
) -> tuple[list[CandidateLabel], list[str]]:
    """Candidate labels for target clusters, plus skip warnings.

    Returns one candidate per cluster with a nonempty document, in cluster
    index order; clusters with empty documents are skipped and reported.
    """
    documents = build_documents(
        videos, list(assignments), m, all_owners=range(num_clusters)
    )
    scores = tfidf_scores(documents)
    candidates: list[CandidateLabel] = []
    warnings: list[str] = []
    for doc in documents:
        try:
            profile = filter_profile(doc, scores, threshold, t, argtop_k)
        except EmptyDocument:
            warnings.append(f"cluster {doc.owner} has no attributes; skipped")
            continue
        candidates.append(
            CandidateLabel(
                name=profile.name(vocab),
                profile=profile,
                source_cluster=int(doc.owner),
            )
        )
    return candidates, warnings


def source_profiles(
    videos: Sequence[VideoRecord],
    shared_names: Sequence[str],
    m: int,
    t: int,
    argtop_k: int = 20,
    threshold: float = 0.5,
) -> list[AttributeProfile]:
    """Per-class profiles for labelled source videos, in shared-name order."""
    labelled = [v for v in videos if v.true_label is not None]
    documents = build_documents(
        labelled,
        [v.true_label for v in labelled],
        m,
        all_owners=list(shared_names),
    )
    scores = tfidf_scores(documents)
    by_owner = {doc.owner: doc for doc in documents}
    profiles = []
    for name in shared_names:
        profiles.append(filter_profile(by_owner[name], scores, threshold, t, argtop_k))
    return profiles


__all__ = [
    "AttributeDocument",
    "AttributeProfile",
    "CandidateLabel",
    "build_documents",
    "discover_candidates",
    "filter_profile",
    "source_profiles",
    "tfidf_scores",
]
