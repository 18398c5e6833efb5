"""Confidence-ranked pseudo-label selection for self-training."""

from __future__ import annotations

import math
from typing import Sequence

from .errors import InvalidPercent
from .zeroshot import Prediction


def select_pseudo_labels(
    predictions: Sequence[Prediction], k_percent: float
) -> list[Prediction]:
    """Keep the top k percent most confident predictions per predicted class.

    The per-class quota is ceil(k/100 * class size), so every nonempty
    class keeps at least one prediction.  Ties on confidence break by
    video id.  The result is ordered by label index, then confidence
    descending, then video id.
    """
    if not 0 < k_percent <= 100:
        raise InvalidPercent(f"k_percent must lie in (0, 100], got {k_percent}")
    groups: dict[int, list[Prediction]] = {}
    for pred in predictions:
        groups.setdefault(pred.label_index, []).append(pred)
    selected: list[Prediction] = []
    for label_index in sorted(groups):
        members = sorted(
            groups[label_index], key=lambda p: (-p.confidence, p.video_id)
        )
        quota = math.ceil(k_percent / 100.0 * len(members))
        selected.extend(members[:quota])
    return selected


__all__ = ["select_pseudo_labels"]
