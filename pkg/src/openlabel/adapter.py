"""Linear adapter trained with a symmetric contrastive objective.

The adapter maps a video embedding v to l2_normalize(W v + b).  Training
aligns adapted embeddings with their (frozen) label embeddings through a
temperature-scaled cosine matrix: rows are softmaxed video-to-text, columns
text-to-video, and each direction pays the symmetric KL divergence against
a label-agreement ground truth, smoothed by epsilon.  All loss and
gradient arithmetic runs in float64; the gradient includes the Jacobian of
the output normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import DegenerateVector, NonFiniteLoss, ValidationError
from .rng import SplitMix64

DEFAULT_LEARNING_RATE = 1e-2
DEFAULT_EPOCHS = 20
DEFAULT_BATCH_SIZE = 32
DEFAULT_SMOOTHING = 1e-6


@dataclass(slots=True)
class TrainConfig:
    """Adapter training hyperparameters."""

    learning_rate: float = DEFAULT_LEARNING_RATE
    epochs: int = DEFAULT_EPOCHS
    batch_size: int = DEFAULT_BATCH_SIZE
    temperature: float = 0.01
    label_smoothing: float = DEFAULT_SMOOTHING
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate < 0:
            raise ValidationError(
                f"learning_rate must be >= 0, got {self.learning_rate}"
            )
        if self.epochs < 0:
            raise ValidationError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 2:
            raise ValidationError(
                f"batch_size must be >= 2, got {self.batch_size}"
            )
        if self.temperature <= 0:
            raise ValidationError(
                f"temperature must be > 0, got {self.temperature}"
            )
        if not 0 <= self.label_smoothing < 1:
            raise ValidationError(
                f"label_smoothing must lie in [0, 1), got {self.label_smoothing}"
            )


def identity_params(dim: int) -> tuple[np.ndarray, np.ndarray]:
    """(W, b) that leave every unit vector's direction unchanged."""
    return np.eye(dim, dtype=np.float64), np.zeros(dim, dtype=np.float64)


def adapt(W: np.ndarray, b: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Apply the adapter and renormalize; rows in, unit rows out (float64)."""
    x = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    u = x @ np.asarray(W, dtype=np.float64).T + np.asarray(b, dtype=np.float64)
    norms = np.linalg.norm(u, axis=-1)
    if np.any(norms <= 1e-12):
        bad = int(np.argmax(norms <= 1e-12))
        raise DegenerateVector(f"adapted row {bad} has norm {norms[bad]!r}")
    out = u / norms[:, None]
    return out[0] if np.asarray(vectors).ndim == 1 else out


def _agreement_targets(labels: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Row and column ground-truth distributions from label agreement."""
    same = (labels[:, None] == labels[None, :]).astype(np.float64)
    row_counts = same.sum(axis=1)
    n = len(labels)
    q_row = same / row_counts[:, None]
    q_col = same / row_counts[None, :]
    q_row = (1.0 - eps) * q_row + eps / n
    q_col = (1.0 - eps) * q_col + eps / n
    return q_row, q_col


def _kl_terms(p: np.ndarray, q: np.ndarray, axis: int) -> tuple[np.ndarray, np.ndarray]:
    """KL(p||q) and KL(q||p) along an axis; q may hold exact zeros."""
    logp = np.log(p)
    with np.errstate(divide="ignore"):
        logq = np.log(q)
    kl_pq = np.sum(p * (logp - logq), axis=axis)
    kl_qp = np.sum(np.where(q > 0, q * (logq - logp), 0.0), axis=axis)
    return kl_pq, kl_qp


def _forward(
    W: np.ndarray,
    b: np.ndarray,
    videos: np.ndarray,
    labels: np.ndarray,
    label_embeddings: np.ndarray,
    temperature: float,
    eps: float,
):
    x = np.asarray(videos, dtype=np.float64)
    n = x.shape[0]
    if n < 2:
        raise ValidationError(f"contrastive batch needs N >= 2, got {n}")
    if len(labels) != n:
        raise ValidationError(f"{n} embeddings but {len(labels)} labels")
    text = np.asarray(label_embeddings, dtype=np.float64)[np.asarray(labels)]
    text_norms = np.linalg.norm(text, axis=1)
    if np.any(text_norms <= 1e-12):
        raise DegenerateVector("label embedding with near-zero norm in batch")
    text = text / text_norms[:, None]

    u = x @ np.asarray(W, dtype=np.float64).T + np.asarray(b, dtype=np.float64)
    u_norms = np.linalg.norm(u, axis=1)
    if np.any(u_norms <= 1e-12):
        raise DegenerateVector("adapted embedding with near-zero norm in batch")
    z = u / u_norms[:, None]

    cos = z @ text.T
    logits = cos / temperature
    p_row = np.exp(logits - logits.max(axis=1, keepdims=True))
    p_row /= p_row.sum(axis=1, keepdims=True)
    p_col = np.exp(logits - logits.max(axis=0, keepdims=True))
    p_col /= p_col.sum(axis=0, keepdims=True)
    q_row, q_col = _agreement_targets(np.asarray(labels), eps)
    return x, text, u, u_norms, z, p_row, p_col, q_row, q_col


def contrastive_loss(
    W: np.ndarray,
    b: np.ndarray,
    videos: np.ndarray,
    labels: np.ndarray,
    label_embeddings: np.ndarray,
    temperature: float = 0.01,
    eps: float = DEFAULT_SMOOTHING,
) -> float:
    """Symmetric KL contrastive loss of one batch.

    ``labels[i]`` indexes ``label_embeddings``; the batch's cosine matrix
    pairs adapted video i against the label embedding of batch item j.
    """
    *_, p_row, p_col, q_row, q_col = _forward(
        W, b, videos, labels, label_embeddings, temperature, eps
    )
    n = p_row.shape[0]
    kl_pq_r, kl_qp_r = _kl_terms(p_row, q_row, axis=1)
    kl_pq_c, kl_qp_c = _kl_terms(p_col, q_col, axis=0)
    return float(
        (kl_pq_r.sum() + kl_qp_r.sum() + kl_pq_c.sum() + kl_qp_c.sum()) / (4.0 * n)
    )


def contrastive_grad(
    W: np.ndarray,
    b: np.ndarray,
    videos: np.ndarray,
    labels: np.ndarray,
    label_embeddings: np.ndarray,
    temperature: float = 0.01,
    eps: float = DEFAULT_SMOOTHING,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Loss plus analytic gradients with respect to W and b.

    d(KL(p||q))/dlogits = p * (log p - log q - KL(p||q)); the reverse
    direction contributes p - q.  The upstream gradient then flows through
    the cosine matrix, the normalization Jacobian (I - z z^T)/||u||, and
    the affine map.
    """
    x, text, u, u_norms, z, p_row, p_col, q_row, q_col = _forward(
        W, b, videos, labels, label_embeddings, temperature, eps
    )
    n = x.shape[0]
    kl_pq_r, kl_qp_r = _kl_terms(p_row, q_row, axis=1)
    kl_pq_c, kl_qp_c = _kl_terms(p_col, q_col, axis=0)
    loss = float(
        (kl_pq_r.sum() + kl_qp_r.sum() + kl_pq_c.sum() + kl_qp_c.sum()) / (4.0 * n)
    )

    with np.errstate(divide="ignore"):
        log_ratio_row = np.log(p_row) - np.log(q_row)
        log_ratio_col = np.log(p_col) - np.log(q_col)
    g_logits = p_row * (log_ratio_row - kl_pq_r[:, None]) + (p_row - q_row)
    g_logits += p_col * (log_ratio_col - kl_pq_c[None, :]) + (p_col - q_col)
    g_logits /= 4.0 * n
    g_cos = g_logits / temperature

    g_z = g_cos @ text
    g_u = (g_z - np.sum(g_z * z, axis=1, keepdims=True) * z) / u_norms[:, None]
    g_w = g_u.T @ x
    g_b = g_u.sum(axis=0)
    return loss, g_w, g_b


class LinearAdapter(BaseEstimator, TransformerMixin):
    """Mini-batch gradient-descent trainer for the linear adapter.

    ``fit(X, y, label_embeddings=...)`` expects video embeddings, integer
    label indices, and the frozen label embedding matrix those indices
    refer to.  Starts from the identity unless ``init`` supplies (W, b).
    After fitting, ``transform`` maps embeddings through the adapter.
    """

    def __init__(
        self,
        learning_rate: float = DEFAULT_LEARNING_RATE,
        epochs: int = DEFAULT_EPOCHS,
        batch_size: int = DEFAULT_BATCH_SIZE,
        temperature: float = 0.01,
        label_smoothing: float = DEFAULT_SMOOTHING,
        seed: int = 0,
    ):
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.batch_size = batch_size
        self.temperature = temperature
        self.label_smoothing = label_smoothing
        self.seed = seed

    def _config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            batch_size=self.batch_size,
            temperature=self.temperature,
            label_smoothing=self.label_smoothing,
            seed=self.seed,
        )

    def fit(
        self,
        X,
        y,
        label_embeddings: np.ndarray | None = None,
        init: tuple[np.ndarray, np.ndarray] | None = None,
    ) -> "LinearAdapter":
        config = self._config()
        videos = np.atleast_2d(np.asarray(X, dtype=np.float64))
        labels = np.asarray(y, dtype=np.int64)
        if label_embeddings is None:
            raise ValidationError("fit requires the label_embeddings matrix")
        if videos.shape[0] < 2:
            raise ValidationError(
                f"training needs at least 2 samples, got {videos.shape[0]}"
            )
        if labels.shape[0] != videos.shape[0]:
            raise ValidationError(
                f"{videos.shape[0]} embeddings but {labels.shape[0]} labels"
            )
        text = np.asarray(label_embeddings, dtype=np.float64)
        if labels.min() < 0 or labels.max() >= text.shape[0]:
            raise ValidationError("label index outside the label embedding matrix")

        dim = videos.shape[1]
        if init is None:
            W, b = identity_params(dim)
        else:
            W = np.array(init[0], dtype=np.float64)
            b = np.array(init[1], dtype=np.float64)
            if W.shape != (dim, dim) or b.shape != (dim,):
                raise ValidationError(
                    f"init shapes {W.shape}/{b.shape} do not match dim {dim}"
                )

        rng = SplitMix64(config.seed)
        order = list(range(videos.shape[0]))
        trace: list[float] = []
        for epoch in range(config.epochs):
            rng.shuffle(order)
            batch_losses: list[float] = []
            for start in range(0, len(order), config.batch_size):
                batch = order[start : start + config.batch_size]
                if len(batch) < 2:
                    continue  # contrastive loss is undefined on a single pair
                loss, g_w, g_b = contrastive_grad(
                    W,
                    b,
                    videos[batch],
                    labels[batch],
                    text,
                    config.temperature,
                    config.label_smoothing,
                )
                if not (
                    np.isfinite(loss)
                    and np.isfinite(g_w).all()
                    and np.isfinite(g_b).all()
                ):
                    raise NonFiniteLoss(
                        f"non-finite loss or gradient at epoch {epoch}", epoch
                    )
                W = W - config.learning_rate * g_w
                b = b - config.learning_rate * g_b
                batch_losses.append(loss)
            trace.append(float(np.mean(batch_losses)))

        self.W_ = W
        self.b_ = b
        self.loss_trace_ = trace
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "W_"):
            raise ValidationError("transform called before fit")
        return adapt(self.W_, self.b_, X)


__all__ = [
    "LinearAdapter",
    "TrainConfig",
    "adapt",
    "contrastive_grad",
    "contrastive_loss",
    "identity_params",
]
