"""Adapter map, contrastive objective, analytic gradients, training loop."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import fd_grads, unit
from openlabel.adapter import (
    LinearAdapter,
    TrainConfig,
    adapt,
    contrastive_grad,
    contrastive_loss,
    identity_params,
)
from openlabel.bundle import normalize_rows
from openlabel.errors import DegenerateVector, NonFiniteLoss, ValidationError


def unit_rows(n, d, seed=0):
    rng = np.random.default_rng(seed)
    return normalize_rows(rng.normal(size=(n, d)))


class TestAdapt:
    def test_identity_on_basis_rows(self):
        W, b = identity_params(4)
        rows = np.eye(4)[:2]
        assert np.array_equal(adapt(W, b, rows), rows)

    def test_scaling_w_changes_nothing(self):
        # output renormalization absorbs any positive scale on W
        v = unit_rows(3, 5, seed=1)
        W, b = identity_params(5)
        assert np.array_equal(adapt(2.0 * W, b, v), adapt(W, b, v))

    def test_rows_come_back_unit_norm(self):
        rng = np.random.default_rng(2)
        W = rng.normal(size=(6, 6))
        b = rng.normal(size=6)
        out = adapt(W, b, rng.normal(size=(10, 6)))
        assert np.allclose(np.linalg.norm(out, axis=1), 1.0, atol=1e-12)

    def test_one_dimensional_round_trip(self):
        W, b = identity_params(3)
        out = adapt(W, b, np.array([3.0, 0.0, 4.0]))
        assert out.ndim == 1
        assert np.allclose(out, [0.6, 0.0, 0.8])

    def test_collapsed_output_rejected(self):
        W = np.zeros((3, 3))
        b = np.zeros(3)
        with pytest.raises(DegenerateVector):
            adapt(W, b, np.ones((1, 3)))


def loss_inputs(n=4, d=8, n_labels=3, seed=0, spread=True):
    rng = np.random.default_rng(seed)
    videos = unit_rows(n, d, seed=seed + 100)
    labels = rng.integers(0, n_labels, size=n) if spread else np.zeros(n, dtype=int)
    text = unit_rows(n_labels, d, seed=seed + 200)
    return videos, labels, text


class TestContrastiveLoss:
    def test_identical_pairs_cost_nothing(self):
        v = unit([1.0, 2.0, 2.0])
        videos = np.tile(v, (4, 1))
        labels = np.zeros(4, dtype=int)
        W, b = identity_params(3)
        loss = contrastive_loss(W, b, videos, labels, v[None, :])
        assert loss < 1e-4

    def test_orthogonal_diagonal_batch_is_near_zero(self):
        W, b = identity_params(2)
        loss = contrastive_loss(
            W, b, np.eye(2), np.array([0, 1]), np.eye(2), temperature=0.01
        )
        assert 0.0 <= loss < 1e-3

    def test_batch_order_does_not_matter(self):
        videos, labels, text = loss_inputs(n=6, seed=3)
        W, b = identity_params(8)
        base = contrastive_loss(W, b, videos, labels, text)
        perm = np.random.default_rng(4).permutation(6)
        shuffled = contrastive_loss(W, b, videos[perm], labels[perm], text)
        assert shuffled == pytest.approx(base, abs=1e-12)

    def test_nonnegative_on_random_batches(self):
        W = np.random.default_rng(5).normal(size=(8, 8))
        b = np.random.default_rng(6).normal(size=8)
        for seed in range(10):
            videos, labels, text = loss_inputs(n=5, seed=seed)
            assert contrastive_loss(W, b, videos, labels, text) >= 0.0

    def test_single_sample_rejected(self):
        W, b = identity_params(3)
        with pytest.raises(ValidationError):
            contrastive_loss(W, b, np.eye(3)[:1], np.array([0]), np.eye(3))

    def test_label_count_mismatch(self):
        W, b = identity_params(3)
        with pytest.raises(ValidationError):
            contrastive_loss(W, b, np.eye(3)[:2], np.array([0]), np.eye(3))


class TestContrastiveGrad:
    def test_matches_finite_differences(self):
        rng = np.random.default_rng(7)
        worst = 0.0
        for trial in range(5):
            videos, labels, text = loss_inputs(n=4, d=8, seed=trial)
            W = np.eye(8) + 0.1 * rng.normal(size=(8, 8))
            b = 0.05 * rng.normal(size=8)
            fn = lambda Wx, bx: contrastive_loss(Wx, bx, videos, labels, text)
            _, g_w, g_b = contrastive_grad(W, b, videos, labels, text)
            f_w, f_b = fd_grads(fn, W, b, h=1e-5)
            rel_w = np.abs(g_w - f_w).max() / max(np.abs(f_w).max(), 1e-12)
            rel_b = np.abs(g_b - f_b).max() / max(np.abs(f_b).max(), 1e-12)
            worst = max(worst, rel_w, rel_b)
        assert worst <= 1e-4

    def test_loss_agrees_with_loss_function(self):
        videos, labels, text = loss_inputs(n=4, seed=9)
        W, b = identity_params(8)
        loss, _, _ = contrastive_grad(W, b, videos, labels, text)
        assert loss == contrastive_loss(W, b, videos, labels, text)

    def test_stationary_at_collapsed_batch(self):
        # all pairs identical: p already equals q, nothing to move
        v = unit([1.0, 0.0, 1.0])
        videos = np.tile(v, (3, 1))
        labels = np.zeros(3, dtype=int)
        W, b = identity_params(3)
        _, g_w, g_b = contrastive_grad(W, b, videos, labels, v[None, :])
        assert np.linalg.norm(g_w) < 1e-6
        assert np.linalg.norm(g_b) < 1e-6


def source_training_data(easy_bundle):
    bundle, _ = easy_bundle
    name_to_index = {n: i for i, n in enumerate(bundle.shared_names)}
    videos = np.asarray([bundle.embedding_of(v) for v in bundle.source_videos()])
    labels = np.asarray([name_to_index[v.true_label] for v in bundle.source_videos()])
    text = normalize_rows(bundle.shared_label_matrix())
    return videos, labels, text


class TestLinearAdapter:
    def test_zero_learning_rate_is_a_no_op(self):
        videos, labels, text = loss_inputs(n=6, seed=11)
        model = LinearAdapter(learning_rate=0.0, epochs=3, batch_size=8)
        model.fit(videos, labels, label_embeddings=text)
        assert np.array_equal(model.W_, np.eye(8))
        assert np.array_equal(model.b_, np.zeros(8))
        assert len(model.loss_trace_) == 3
        assert model.loss_trace_[0] == pytest.approx(model.loss_trace_[-1], abs=1e-12)

    def test_training_reduces_loss(self, easy_bundle):
        videos, labels, text = source_training_data(easy_bundle)
        model = LinearAdapter(epochs=20, seed=0)
        model.fit(videos, labels, label_embeddings=text)
        assert len(model.loss_trace_) == 20
        assert model.loss_trace_[-1] < model.loss_trace_[0]
        assert all(np.isfinite(model.loss_trace_))

    def test_same_seed_same_weights(self, easy_bundle):
        videos, labels, text = source_training_data(easy_bundle)
        runs = []
        for _ in range(2):
            model = LinearAdapter(epochs=3, seed=42)
            model.fit(videos, labels, label_embeddings=text)
            runs.append((model.W_.tobytes(), model.b_.tobytes(), model.loss_trace_))
        assert runs[0] == runs[1]

    def test_init_override_respected(self):
        videos, labels, text = loss_inputs(n=4, seed=12)
        W0 = np.eye(8) * 0.5
        b0 = np.full(8, 0.25)
        model = LinearAdapter(learning_rate=0.0, epochs=1)
        model.fit(videos, labels, label_embeddings=text, init=(W0, b0))
        assert np.array_equal(model.W_, W0)
        assert np.array_equal(model.b_, b0)

    def test_zero_epochs_keeps_identity(self):
        videos, labels, text = loss_inputs(n=4, seed=13)
        model = LinearAdapter(epochs=0)
        model.fit(videos, labels, label_embeddings=text)
        assert np.array_equal(model.W_, np.eye(8))
        assert model.loss_trace_ == []

    def test_trailing_singleton_batch_skipped(self):
        videos, labels, text = loss_inputs(n=5, seed=14)
        model = LinearAdapter(epochs=2, batch_size=4)
        model.fit(videos, labels, label_embeddings=text)  # 4 + 1 split per epoch
        assert len(model.loss_trace_) == 2

    def test_transform_applies_fitted_params(self):
        videos, labels, text = loss_inputs(n=4, seed=15)
        model = LinearAdapter(epochs=2).fit(videos, labels, label_embeddings=text)
        probe = unit_rows(3, 8, seed=16)
        assert np.array_equal(model.transform(probe), adapt(model.W_, model.b_, probe))

    def test_transform_before_fit(self):
        with pytest.raises(ValidationError):
            LinearAdapter().transform(np.eye(3))

    def test_nan_init_raises_with_epoch(self):
        videos, labels, text = loss_inputs(n=4, seed=17)
        W0 = np.full((8, 8), np.nan)
        model = LinearAdapter(epochs=2)
        with pytest.raises(NonFiniteLoss) as info:
            model.fit(videos, labels, label_embeddings=text, init=(W0, np.zeros(8)))
        assert info.value.epoch == 0

    def test_missing_label_embeddings(self):
        videos, labels, _ = loss_inputs(n=4, seed=18)
        with pytest.raises(ValidationError):
            LinearAdapter().fit(videos, labels)

    def test_needs_two_samples(self):
        with pytest.raises(ValidationError):
            LinearAdapter().fit(np.eye(3)[:1], np.array([0]), label_embeddings=np.eye(3))

    @pytest.mark.parametrize("bad_label", [-1, 3])
    def test_label_bounds(self, bad_label):
        videos = unit_rows(2, 3, seed=19)
        with pytest.raises(ValidationError):
            LinearAdapter().fit(
                videos, np.array([0, bad_label]), label_embeddings=np.eye(3)
            )

    def test_init_shape_checked(self):
        videos, labels, text = loss_inputs(n=4, seed=20)
        with pytest.raises(ValidationError):
            LinearAdapter().fit(
                videos, labels, label_embeddings=text, init=(np.eye(3), np.zeros(3))
            )

    def test_get_params_round_trip(self):
        model = LinearAdapter(learning_rate=0.5, epochs=7, seed=9)
        params = model.get_params()
        assert params["learning_rate"] == 0.5
        assert params["epochs"] == 7
        clone = LinearAdapter(**params)
        assert clone.get_params() == params


class TestTrainConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"learning_rate": -0.1},
            {"epochs": -1},
            {"batch_size": 1},
            {"temperature": 0.0},
            {"temperature": -2.0},
            {"label_smoothing": 1.0},
            {"label_smoothing": -0.1},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValidationError):
            TrainConfig(**kwargs)

    def test_defaults_are_valid(self):
        config = TrainConfig()
        assert config.epochs == 20
        assert config.batch_size == 32
