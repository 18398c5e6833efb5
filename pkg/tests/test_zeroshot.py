"""Cosine scoring, extended label sets, and the rejection baselines."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_profile, make_tiny_bundle, unit
from openlabel.bundle import VideoRecord, normalize_rows
from openlabel.discovery import CandidateLabel
from openlabel.errors import (
    DegenerateVector,
    GroundTruthUnavailable,
    ValidationError,
)
from openlabel.zeroshot import (
    ExtendedLabelSet,
    baseline_instance_extension_predict,
    baseline_threshold_predict,
    build_extended_label_set,
    compose_label_embedding,
    cosine,
    oracle_extend,
    predict_batch,
    predict_video,
    softmax_scores,
)


def candidate(name, indices, cluster=0):
    return CandidateLabel(
        name=name, profile=make_profile(f"cluster_{cluster}", indices), source_cluster=cluster
    )


class TestCosine:
    def test_parallel(self):
        assert cosine(np.array([2.0, 0.0]), np.array([5.0, 0.0])) == 1.0

    def test_orthogonal(self):
        assert cosine(np.array([1.0, 0.0]), np.array([0.0, 3.0])) == 0.0

    def test_forty_five_degrees(self):
        got = cosine(np.array([1.0, 1.0]), np.array([1.0, 0.0]))
        assert got == pytest.approx(0.7071, abs=1e-4)
        assert got == pytest.approx(np.sqrt(0.5), abs=1e-12)

    def test_antiparallel_clamped(self):
        assert cosine(np.array([1.0, 0.0]), np.array([-1.0, 0.0])) == -1.0

    @given(
        st.lists(st.floats(-3, 3), min_size=3, max_size=3),
        st.lists(st.floats(-3, 3), min_size=3, max_size=3),
    )
    def test_exactly_symmetric(self, a, b):
        v = np.asarray(a)
        w = np.asarray(b)
        if np.linalg.norm(v) <= 1e-6 or np.linalg.norm(w) <= 1e-6:
            return
        assert cosine(v, w) == cosine(w, v)

    def test_zero_vector_rejected(self):
        with pytest.raises(DegenerateVector):
            cosine(np.zeros(3), np.ones(3))


class TestSoftmax:
    def test_single_entry(self):
        assert softmax_scores(np.array([0.3]), 0.01).tolist() == [1.0]

    def test_low_temperature_sharpens(self):
        probs = softmax_scores(np.array([1.0, 0.0]), 0.01)
        assert probs[0] == pytest.approx(1.0, abs=1e-9)

    def test_high_temperature_flattens(self):
        probs = softmax_scores(np.array([1.0, 0.0, -1.0]), 1e6)
        assert np.all(np.abs(probs - 1.0 / 3.0) < 1e-6)

    def test_rowwise_on_matrix(self):
        probs = softmax_scores(np.array([[1.0, 0.0], [0.0, 1.0]]), 0.5)
        assert probs.shape == (2, 2)
        assert np.allclose(probs.sum(axis=-1), 1.0, atol=1e-12)
        assert probs[0, 0] == probs[1, 1]

    @given(
        st.lists(st.floats(-1, 1), min_size=1, max_size=6),
        st.sampled_from([0.01, 0.1, 1.0]),
    )
    def test_is_a_distribution(self, scores, tau):
        probs = softmax_scores(np.asarray(scores), tau)
        assert abs(probs.sum() - 1.0) < 1e-9
        assert np.all(probs > 0)

    @pytest.mark.parametrize("tau", [0.0, -1.0])
    def test_temperature_must_be_positive(self, tau):
        with pytest.raises(ValidationError):
            softmax_scores(np.array([1.0]), tau)


class TestComposeLabelEmbedding:
    def test_singleton_profile_is_that_row(self):
        rows = np.eye(4, dtype=np.float32)
        got = compose_label_embedding(make_profile("c", [2]), rows)
        assert np.array_equal(got, np.array([0.0, 0.0, 1.0, 0.0]))

    def test_mean_is_unit_norm(self):
        rows = normalize_rows(np.random.default_rng(3).normal(size=(6, 5)))
        got = compose_label_embedding(make_profile("c", [0, 2, 5]), rows)
        assert np.linalg.norm(got) == pytest.approx(1.0, abs=1e-12)
        expect = unit(rows[[0, 2, 5]].mean(axis=0))
        assert np.allclose(got, expect, atol=1e-12)

    def test_cancelling_rows_rejected(self):
        rows = np.array([[1.0, 0.0], [-1.0, 0.0]])
        with pytest.raises(DegenerateVector):
            compose_label_embedding(make_profile("c", [0, 1]), rows)

    def test_empty_profile_rejected(self):
        with pytest.raises(ValidationError):
            compose_label_embedding(make_profile("c", []), np.eye(2))


class TestExtendedLabelSet:
    def _eye_set(self, **kwargs):
        defaults = dict(
            shared_names=("a", "b"),
            private_names=("p",),
            embeddings=np.eye(3),
        )
        defaults.update(kwargs)
        return ExtendedLabelSet(**defaults)

    def test_names_shared_first(self):
        ls = self._eye_set()
        assert ls.names == ("a", "b", "p")
        assert ls.num_shared == 2

    def test_duplicate_names_rejected(self):
        with pytest.raises(ValidationError):
            self._eye_set(private_names=("a",))

    def test_needs_shared_labels(self):
        with pytest.raises(ValidationError):
            self._eye_set(shared_names=(), private_names=("p", "q", "r"))

    def test_row_count_must_cover_names(self):
        with pytest.raises(ValidationError):
            self._eye_set(embeddings=np.eye(2))

    def test_temperature_validated(self):
        with pytest.raises(ValidationError):
            self._eye_set(temperature=0.0)


class TestBuildExtendedLabelSet:
    def test_no_survivors_keeps_shared_only(self):
        bundle = make_tiny_bundle()
        ls, warnings = build_extended_label_set(bundle, [])
        assert ls.names == ("walk",)
        assert warnings == []
        assert np.allclose(ls.embeddings, normalize_rows(bundle.shared_label_matrix()))

    def test_candidate_rows_are_composed_profiles(self):
        bundle = make_tiny_bundle()
        cand = candidate("street scene", [1], cluster=0)
        ls, warnings = build_extended_label_set(bundle, [cand])
        assert warnings == []
        assert ls.names == ("walk", "street scene")
        assert ls.candidates == (cand,)
        expect = compose_label_embedding(cand.profile, bundle.attribute_embeddings)
        assert np.allclose(ls.embeddings[1], expect, atol=1e-12)

    def test_name_collision_dropped_with_warning(self):
        bundle = make_tiny_bundle()
        ls, warnings = build_extended_label_set(
            bundle, [candidate("walk", [1], cluster=3)]
        )
        assert ls.names == ("walk",)
        assert len(warnings) == 1
        assert "walk" in warnings[0] and "cluster 3" in warnings[0]


class TestOracleExtend:
    def test_sorted_private_names(self, easy_bundle):
        bundle, truth = easy_bundle
        ls = oracle_extend(bundle, truth.private_prototypes)
        assert ls.shared_names == bundle.shared_names
        assert list(ls.private_names) == sorted(truth.private_prototypes)
        assert ls.embeddings.shape == (len(ls.names), bundle.dim)
        assert ls.candidates == ()

    @pytest.mark.parametrize("missing", [None, {}])
    def test_requires_prototypes(self, missing):
        with pytest.raises(GroundTruthUnavailable):
            oracle_extend(make_tiny_bundle(), missing)


def eye_label_set(temperature=0.01):
    return ExtendedLabelSet(
        shared_names=("a", "b"),
        private_names=("p",),
        embeddings=np.eye(4)[:3],
        temperature=temperature,
    )


class TestPredict:
    def test_shared_hit(self):
        preds = predict_batch(np.eye(4)[:1], ["v0"], eye_label_set())
        p = preds[0]
        assert (p.label_index, p.label_name, p.is_private) == (0, "a", False)
        assert p.confidence == pytest.approx(1.0, abs=1e-9)
        assert p.video_id == "v0"

    def test_private_hit_is_rejected(self):
        p = predict_batch(np.eye(4)[2:3], ["v1"], eye_label_set())[0]
        assert (p.label_index, p.label_name, p.is_private) == (2, "p", True)

    def test_argmax_matches_cosine_loop(self, easy_bundle):
        bundle, truth = easy_bundle
        ls = oracle_extend(bundle, truth.private_prototypes)
        rows = np.asarray([bundle.embedding_of(v) for v in bundle.target_videos()])
        ids = [v.id for v in bundle.target_videos()]
        preds = predict_batch(rows, ids, ls)
        for row, pred in zip(rows, preds):
            scores = [cosine(row, ls.embeddings[j]) for j in range(len(ls.names))]
            assert pred.label_index == int(np.argmax(scores))

    def test_argmax_invariant_to_temperature(self, easy_bundle):
        bundle, truth = easy_bundle
        rows = np.asarray([bundle.embedding_of(v) for v in bundle.target_videos()])
        ids = [v.id for v in bundle.target_videos()]
        picks = []
        for tau in (0.01, 0.1, 1.0):
            ls = oracle_extend(bundle, truth.private_prototypes, temperature=tau)
            picks.append([p.label_index for p in predict_batch(rows, ids, ls)])
        assert picks[0] == picks[1] == picks[2]

    def test_appending_weaker_label_cannot_steal_argmax(self):
        video = unit([0.9, 0.1, 0.0, 0.0])[None, :]
        base = ExtendedLabelSet(
            shared_names=("a", "b"), private_names=(), embeddings=np.eye(4)[:2]
        )
        extended = ExtendedLabelSet(
            shared_names=("a", "b"), private_names=("p",), embeddings=np.eye(4)[:3]
        )
        before = predict_batch(video, ["v"], base)[0]
        after = predict_batch(video, ["v"], extended)[0]
        assert before.label_index == after.label_index == 0
        assert not after.is_private

    def test_predict_video_uses_bundle_row(self):
        bundle = make_tiny_bundle()
        ls, _ = build_extended_label_set(bundle, [candidate("street", [1])])
        target = bundle.target_videos()[0]
        single = predict_video(target, bundle, ls)
        batch = predict_batch(
            bundle.embedding_of(target)[None, :], [target.id], ls
        )[0]
        assert single == batch
        assert single.is_private  # t0 sits on the street attribute axis

    def test_zero_norm_video_rejected(self):
        with pytest.raises(DegenerateVector):
            predict_batch(np.zeros((1, 4)), ["v"], eye_label_set())


class TestThresholdBaseline:
    def test_confident_video_stays_known(self):
        bundle = make_tiny_bundle()
        preds = baseline_threshold_predict(np.eye(4)[:1], ["v"], bundle, 0.9)
        assert preds[0].label_name == "walk"
        assert not preds[0].is_private

    def test_distant_video_rejected(self):
        bundle = make_tiny_bundle()
        preds = baseline_threshold_predict(np.eye(4)[3:4], ["v"], bundle, 0.9)
        assert preds[0].is_private
        assert preds[0].label_name == "walk"  # best shared guess is still recorded

    def test_boundary_cosine_counts_as_known(self):
        # rejection is strict: cos exactly at the threshold passes
        bundle = make_tiny_bundle()
        video = np.array([[0.5, 0.0, 0.5, np.sqrt(0.5)]])
        preds = baseline_threshold_predict(video, ["v"], bundle, 0.5)
        assert not preds[0].is_private

    def test_rejections_monotone_in_threshold(self, easy_bundle):
        bundle, _ = easy_bundle
        rows = np.asarray([bundle.embedding_of(v) for v in bundle.target_videos()])
        ids = [v.id for v in bundle.target_videos()]
        counts = []
        for theta in (0.1, 0.3, 0.5, 0.7, 0.9):
            preds = baseline_threshold_predict(rows, ids, bundle, theta)
            counts.append(sum(p.is_private for p in preds))
        assert counts == sorted(counts)

    @pytest.mark.parametrize("theta", [-0.01, 1.01])
    def test_threshold_range(self, theta):
        with pytest.raises(ValidationError):
            baseline_threshold_predict(np.eye(4)[:1], ["v"], make_tiny_bundle(), theta)


class TestInstanceExtensionBaseline:
    def test_video_on_shared_axis_stays_known(self):
        bundle = make_tiny_bundle()
        record = VideoRecord(
            id="probe", domain="target", embedding_index=0, frames=((1,),)
        )
        pred = baseline_instance_extension_predict(record, bundle, m=5)
        assert pred.label_name == "walk"
        assert not pred.is_private

    def test_video_on_own_attribute_rejected(self):
        bundle = make_tiny_bundle()
        target = bundle.target_videos()[0]  # embedding e1 == street attribute
        pred = baseline_instance_extension_predict(target, bundle, m=5)
        assert pred.is_private
        assert pred.label_name == "street"

    def test_no_attributes_degrades_to_closed_set(self):
        bundle = make_tiny_bundle()
        record = VideoRecord(
            id="bare", domain="target", embedding_index=1, frames=((),)
        )
        pred = baseline_instance_extension_predict(record, bundle, m=5)
        assert not pred.is_private
        assert pred.label_name == "walk"

    def test_embedding_override(self):
        bundle = make_tiny_bundle()
        target = bundle.target_videos()[0]
        pred = baseline_instance_extension_predict(
            target, bundle, m=5, embedding=np.eye(4)[0]
        )
        assert pred.label_name == "walk"
        assert not pred.is_private
