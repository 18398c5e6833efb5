"""Open-set evaluation: ALL, OS*, UNK and their harmonic summary.

This is the only module allowed to read target ground-truth labels.  Any
ground-truth class outside the shared label set counts as unknown, and a
prediction on any private candidate counts as predicting unknown.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import EmptyEvaluation, MissingGroundTruth
from .zeroshot import Prediction


def hos(os_star: float, unk: float) -> float:
    """Harmonic mean of OS* and UNK on the 0..100 scale; 0 when both are 0."""
    if os_star < 0 or unk < 0:
        raise ValueError(f"scores must be nonnegative, got {os_star}, {unk}")
    total = os_star + unk
    if total == 0:
        return 0.0
    return 2.0 * os_star * unk / total


@dataclass(frozen=True, slots=True)
class OpenSetMetrics:
    """Percentages in [0, 100] plus per-class detail and sample counts."""

    all: float
    os_star: float
    unk: float
    hos: float
    per_class_accuracy: dict[str, float]
    counts: dict[str, int]

    def to_json_dict(self) -> dict:
        return {
            "all": self.all,
            "os_star": self.os_star,
            "unk": self.unk,
            "hos": self.hos,
            "per_class_accuracy": {
                k: self.per_class_accuracy[k] for k in sorted(self.per_class_accuracy)
            },
            "counts": {k: self.counts[k] for k in sorted(self.counts)},
        }


def evaluate(
    predictions: Sequence[Prediction],
    ground_truth: Mapping[str, str],
    shared_names: Sequence[str],
) -> OpenSetMetrics:
    """Score open-set predictions against ground-truth class names.

    A known sample is correct when it is not rejected and the predicted
    name equals its class; an unknown sample is correct when it is
    rejected, whichever private candidate it landed on.  OS* averages
    per-class accuracy over shared classes that actually appear; UNK is
    recall of the unknown samples; ALL is micro accuracy over everything.
    """
    if not predictions:
        raise EmptyEvaluation("cannot evaluate an empty prediction list")
    shared = set(shared_names)
    class_total: dict[str, int] = {}
    class_correct: dict[str, int] = {}
    n_unknown = n_unknown_correct = 0
    n_correct = 0
    for pred in predictions:
        truth = ground_truth.get(pred.video_id)
        if truth is None:
            raise MissingGroundTruth(
                f"no ground truth for video {pred.video_id!r}"
            )
        if truth in shared:
            class_total[truth] = class_total.get(truth, 0) + 1
            correct = (not pred.is_private) and pred.label_name == truth
            if correct:
                class_correct[truth] = class_correct.get(truth, 0) + 1
        else:
            n_unknown += 1
            correct = pred.is_private
            if correct:
                n_unknown_correct += 1
        if correct:
            n_correct += 1

    per_class = {
        name: 100.0 * class_correct.get(name, 0) / total
        for name, total in class_total.items()
    }
    os_star = sum(per_class.values()) / len(per_class) if per_class else 0.0
    unk = 100.0 * n_unknown_correct / n_unknown if n_unknown else 0.0
    all_acc = 100.0 * n_correct / len(predictions)
    return OpenSetMetrics(
        all=all_acc,
        os_star=os_star,
        unk=unk,
        hos=hos(os_star, unk),
        per_class_accuracy=per_class,
        counts={
            "total": len(predictions),
            "known": sum(class_total.values()),
            "unknown": n_unknown,
            "correct": n_correct,
        },
    )


def ground_truth_map(bundle, extra: Mapping[str, str] | None = None) -> dict[str, str]:
    """Video id to true class name, for evaluation only.

    Merges an optional external map (a ground-truth file) with the held-out
    labels carried by the bundle's target records.  Reading target labels
    is this module's privilege; no other stage may touch them.
    """
    gt: dict[str, str] = dict(extra) if extra else {}
    for video in bundle.videos:
        if video.domain == "target" and video.true_label is not None:
            gt[video.id] = video.true_label
    return gt


def format_table(rows: Sequence[tuple[str, OpenSetMetrics | None]]) -> str:
    """Fixed-width table of metrics rows in ALL, OS*, UNK, HOS column order."""
    name_width = max([len(name) for name, _ in rows] + [len("strategy")])
    header = (
        f"{'strategy':<{name_width}}  {'ALL':>6}  {'OS*':>6}  {'UNK':>6}  {'HOS':>6}"
    )
    lines = [header, "-" * len(header)]
    for name, metrics in rows:
        if metrics is None:
            lines.append(
                f"{name:<{name_width}}  {'n/a':>6}  {'n/a':>6}  {'n/a':>6}  {'n/a':>6}"
            )
        else:
            lines.append(
                f"{name:<{name_width}}  {metrics.all:>6.1f}  {metrics.os_star:>6.1f}"
                f"  {metrics.unk:>6.1f}  {metrics.hos:>6.1f}"
            )
    return "\n".join(lines)


__all__ = ["OpenSetMetrics", "evaluate", "format_table", "hos"]
