"""Open-set scoring: HOS arithmetic, evaluate, reporting helpers."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from openlabel.errors import EmptyEvaluation, MissingGroundTruth
from openlabel.metrics import (
    OpenSetMetrics,
    evaluate,
    format_table,
    ground_truth_map,
    hos,
)
from openlabel.zeroshot import Prediction


def pred(video_id, label_name, is_private=False, confidence=0.9, label_index=0):
    return Prediction(
        video_id=video_id,
        label_index=label_index,
        label_name=label_name,
        confidence=confidence,
        is_private=is_private,
    )


class TestHos:
    @pytest.mark.parametrize(
        "os_star,unk,expected",
        [
            (82.5, 94.3, 88.0),
            (82.9, 88.2, 85.5),
            (26.1, 52.3, 34.8),
        ],
    )
    def test_reported_operating_points(self, os_star, unk, expected):
        assert hos(os_star, unk) == pytest.approx(expected, abs=0.05)

    def test_degenerate_pairs(self):
        assert hos(0.0, 0.0) == 0.0
        assert hos(0.0, 100.0) == 0.0
        assert hos(100.0, 0.0) == 0.0

    @given(st.floats(0.0, 100.0))
    def test_equal_inputs_fixed_point(self, x):
        assert hos(x, x) == pytest.approx(x, rel=1e-12, abs=1e-12)

    @given(st.floats(0.0, 100.0), st.floats(0.0, 100.0))
    def test_symmetric(self, a, b):
        assert hos(a, b) == hos(b, a)

    @given(st.floats(0.1, 100.0), st.floats(0.1, 100.0))
    def test_between_min_and_max(self, a, b):
        h = hos(a, b)
        assert min(a, b) - 1e-9 <= h <= max(a, b) + 1e-9

    @pytest.mark.parametrize("pair", [(-1.0, 50.0), (50.0, -0.5)])
    def test_rejects_negative(self, pair):
        with pytest.raises(ValueError):
            hos(*pair)


SHARED = ("walk", "run")


def miniature():
    predictions = [
        pred("v1", "walk"),
        pred("v2", "run"),  # truth walk: wrong class
        pred("v3", "run"),
        pred("v4", "cand_0", is_private=True),
        pred("v5", "walk"),  # truth jump: should have been rejected
    ]
    truth = {"v1": "walk", "v2": "walk", "v3": "run", "v4": "jump", "v5": "jump"}
    return predictions, truth


class TestEvaluate:
    def test_all_correct_scores_hundred(self):
        predictions = [pred("a", "walk"), pred("b", "run"), pred("c", "x", is_private=True)]
        truth = {"a": "walk", "b": "run", "c": "jump"}
        m = evaluate(predictions, truth, SHARED)
        assert (m.all, m.os_star, m.unk, m.hos) == (100.0, 100.0, 100.0, 100.0)

    def test_hand_computed_miniature(self):
        predictions, truth = miniature()
        m = evaluate(predictions, truth, SHARED)
        assert m.per_class_accuracy == {"walk": 50.0, "run": 100.0}
        assert m.os_star == 75.0
        assert m.unk == 50.0
        assert m.all == 60.0
        assert m.hos == hos(75.0, 50.0) == 60.0
        assert m.counts == {"total": 5, "known": 3, "unknown": 2, "correct": 3}

    def test_order_of_predictions_is_irrelevant(self):
        predictions, truth = miniature()
        a = evaluate(predictions, truth, SHARED)
        b = evaluate(list(reversed(predictions)), truth, SHARED)
        assert a.all == b.all
        assert a.unk == b.unk
        assert a.os_star == pytest.approx(b.os_star, abs=1e-12)
        assert a.hos == pytest.approx(b.hos, abs=1e-12)
        assert a.counts == b.counts

    def test_private_name_does_not_matter_for_unknowns(self):
        # rejection is what gets scored, not which candidate caught it
        predictions, truth = miniature()
        renamed = [
            pred(p.video_id, "something else", is_private=True)
            if p.is_private
            else p
            for p in predictions
        ]
        assert evaluate(renamed, truth, SHARED) == evaluate(predictions, truth, SHARED)

    def test_rejected_known_sample_is_wrong_even_with_right_name(self):
        m = evaluate(
            [pred("a", "walk", is_private=True)], {"a": "walk"}, SHARED
        )
        assert m.all == 0.0
        assert m.per_class_accuracy == {"walk": 0.0}

    def test_absent_shared_classes_do_not_dilute_os_star(self):
        m = evaluate(
            [pred("a", "walk")], {"a": "walk"}, ("walk", "run", "swim")
        )
        assert m.per_class_accuracy == {"walk": 100.0}
        assert m.os_star == 100.0

    def test_unk_zero_when_everything_is_known(self):
        m = evaluate(
            [pred("a", "walk"), pred("b", "run")],
            {"a": "walk", "b": "run"},
            SHARED,
        )
        assert m.unk == 0.0
        assert m.hos == 0.0
        assert m.counts["unknown"] == 0

    def test_empty_predictions_rejected(self):
        with pytest.raises(EmptyEvaluation):
            evaluate([], {}, SHARED)

    def test_missing_ground_truth_rejected(self):
        with pytest.raises(MissingGroundTruth):
            evaluate([pred("ghost", "walk")], {"other": "walk"}, SHARED)


class TestGroundTruthMap:
    def test_collects_target_labels(self, easy_bundle):
        bundle, truth = easy_bundle
        gt = ground_truth_map(bundle)
        targets = bundle.target_videos()
        assert set(gt) == {v.id for v in targets}
        for video in targets:
            assert gt[video.id] == video.true_label == truth.video_labels[video.id]

    def test_extra_entries_merge_and_bundle_wins(self, easy_bundle):
        bundle, _ = easy_bundle
        some_target = bundle.target_videos()[0]
        extra = {"external_clip": "walk", some_target.id: "not the real label"}
        gt = ground_truth_map(bundle, extra)
        assert gt["external_clip"] == "walk"
        assert gt[some_target.id] == some_target.true_label


class TestReporting:
    def test_json_dict_keys_sorted(self):
        m = OpenSetMetrics(
            all=1.0,
            os_star=2.0,
            unk=3.0,
            hos=4.0,
            per_class_accuracy={"zeta": 1.0, "alpha": 2.0},
            counts={"total": 2, "correct": 1, "known": 2, "unknown": 0},
        )
        d = m.to_json_dict()
        assert list(d["per_class_accuracy"]) == ["alpha", "zeta"]
        assert list(d["counts"]) == ["correct", "known", "total", "unknown"]
        assert d["hos"] == 4.0

    def test_table_lines_up(self):
        predictions, truth = miniature()
        m = evaluate(predictions, truth, SHARED)
        text = format_table([("discovered", m), ("oracle", None)])
        lines = text.splitlines()
        assert lines[0].split() == ["strategy", "ALL", "OS*", "UNK", "HOS"]
        assert set(lines[1]) == {"-"}
        assert lines[2].split() == ["discovered", "60.0", "75.0", "50.0", "60.0"]
        assert lines[3].split() == ["oracle", "n/a", "n/a", "n/a", "n/a"]
        assert len({len(line) for line in lines[1:]}) == 1  # fixed width

    def test_table_widens_for_long_names(self):
        text = format_table([("a strategy with a very long name", None)])
        assert "a strategy with a very long name" in text.splitlines()[2]
