"""Position-weighted similarity between attribute profiles, and pruning.

A candidate whose profile is too similar to any source-class profile is a
rediscovery of a shared class and is dropped; the survivors become the
private half of the extended label set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .discovery import AttributeProfile, CandidateLabel
from .errors import EmptyProfile, ValidationError


def position_weights(n: int) -> list[float]:
    """Weights for rank offsets 0..n-1, rescaled to [1, ..., 0].

    The reference sequence n-1, n-2, ..., 0 is min-max normalized, so an
    exact rank match weighs 1.0 and the largest offset weighs 0.0.  For
    n = 1 the single weight is 1.0.
    """
    if n < 1:
        raise ValidationError(f"weight count must be >= 1, got {n}")
    if n == 1:
        return [1.0]
    return [(n - 1 - i) / (n - 1) for i in range(n)]


def attribute_sim(source: AttributeProfile, target: AttributeProfile) -> float:
    """Rank-offset-weighted overlap of two profiles, in [0, 1].

    For every attribute the profiles share, the weight for the absolute
    rank offset is accumulated; offsets at or beyond the source length
    contribute 0.  The sum is divided by the source profile length.
    """
    if len(source) == 0 or len(target) == 0:
        raise EmptyProfile(
            f"profiles must be nonempty (source owner {source.owner!r}, "
            f"target owner {target.owner!r})"
        )
    weights = position_weights(len(source))
    tgt_rank = {attr: i for i, attr in enumerate(target.indices)}
    score = 0.0
    for s_rank, attr in enumerate(source.indices):
        t_rank = tgt_rank.get(attr)
        if t_rank is None:
            continue
        offset = abs(t_rank - s_rank)
        if offset < len(weights):
            score += weights[offset]
    return score / len(source)


@dataclass(frozen=True, slots=True)
class SimilarityMatrix:
    """Source-class x candidate similarity scores with their labels."""

    values: np.ndarray
    row_labels: tuple[str, ...]
    col_clusters: tuple[int, ...]


def build_similarity_matrix(
    source_profiles: Sequence[AttributeProfile],
    row_labels: Sequence[str],
    candidates: Sequence[CandidateLabel],
) -> SimilarityMatrix:
    """Pairwise attribute_sim of every source profile against every candidate."""
    if len(source_profiles) != len(row_labels):
        raise ValidationError(
            f"{len(source_profiles)} profiles but {len(row_labels)} row labels"
        )
    values = np.zeros((len(source_profiles), len(candidates)), dtype=np.float64)
    for i, src in enumerate(source_profiles):
        for j, cand in enumerate(candidates):
            values[i, j] = attribute_sim(src, cand.profile)
    return SimilarityMatrix(
        values=values,
        row_labels=tuple(row_labels),
        col_clusters=tuple(c.source_cluster for c in candidates),
    )


@dataclass(frozen=True, slots=True)
class PrunedCandidate:
    """A candidate dropped for matching a shared class."""

    candidate: CandidateLabel
    matched_label: str
    score: float


def match_and_prune(
    matrix: SimilarityMatrix,
    gamma: float,
    candidates: Sequence[CandidateLabel],
) -> tuple[list[CandidateLabel], list[PrunedCandidate]]:
    """Split candidates into survivors and pruned rediscoveries.

    A candidate is pruned exactly when some source class scores at or
    above gamma against it; the recorded match is the best-scoring row.
    A candidate sharing nothing with any class (score 0) always survives,
    whatever gamma.  Survivors keep cluster-index order.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValidationError(f"gamma must lie in [0, 1], got {gamma}")
    if matrix.values.shape != (len(matrix.row_labels), len(candidates)):
        raise ValidationError(
            f"similarity matrix shape {matrix.values.shape} does not cover "
            f"{len(candidates)} candidates"
        )
    survivors: list[CandidateLabel] = []
    pruned: list[PrunedCandidate] = []
    for j, cand in enumerate(candidates):
        column = matrix.values[:, j]
        if column.size and float(column.max()) >= gamma and float(column.max()) > 0.0:
            best = int(np.argmax(column))
            pruned.append(
                PrunedCandidate(
                    candidate=cand,
                    matched_label=matrix.row_labels[best],
                    score=float(column[best]),
                )
            )
        else:
            survivors.append(cand)
    return survivors, pruned


__all__ = [
    "PrunedCandidate",
    "SimilarityMatrix",
    "attribute_sim",
    "build_similarity_matrix",
    "match_and_prune",
    "position_weights",
]
