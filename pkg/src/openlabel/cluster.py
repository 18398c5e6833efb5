"""Deterministic k-means over unit-norm embedding vectors.

Lloyd's algorithm with k-means++ seeding drawn from the package PRNG.
Distance ties resolve to the lowest centroid index, and a cluster left
empty by an assignment pass is re-seeded to the point farthest from its
own centroid, so identical (points, n_clusters, seed) inputs always give
an identical model.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from .errors import DimensionMismatch, TooFewPoints, ValidationError
from .rng import SplitMix64


def _as_points(x, what: str = "points") -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ValidationError(f"{what} must be a 2-D array, got ndim {arr.ndim}")
    if arr.shape[0] == 0:
        raise ValidationError(f"{what} must hold at least one row")
    if not np.isfinite(arr).all():
        raise ValidationError(f"{what} contains non-finite values")
    return arr


def _sq_distances(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _plus_plus_init(points: np.ndarray, k: int, rng: SplitMix64) -> np.ndarray:
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]), dtype=np.float64)
    centroids[0] = points[rng.randint(n)]
    d2 = _sq_distances(points, centroids[:1]).min(axis=1)
    for c in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            idx = rng.randint(n)
        else:
            idx = rng.weighted_index(d2)
        centroids[c] = points[idx]
        d2 = np.minimum(d2, _sq_distances(points, centroids[c : c + 1]).min(axis=1))
    return centroids


def _fill_empty_clusters(
    points: np.ndarray, assign: np.ndarray, centroids: np.ndarray
) -> None:
    """Re-seed each empty cluster to the point farthest from its centroid.

    Mutates assign and centroids in place.  Points are only stolen from
    clusters with two or more members so the donor never empties.
    """
    k = centroids.shape[0]
    counts = np.bincount(assign, minlength=k)
    for c in range(k):
        if counts[c] > 0:
            continue
        dist_to_own = np.einsum(
            "nd,nd->n", points - centroids[assign], points - centroids[assign]
        )
        eligible = counts[assign] >= 2
        if not eligible.any():
            raise ValidationError("cannot repair empty cluster: all donors are singletons")
        dist_to_own = np.where(eligible, dist_to_own, -np.inf)
        p = int(np.argmax(dist_to_own))
        counts[assign[p]] -= 1
        assign[p] = c
        counts[c] = 1
        centroids[c] = points[p]


def _means(points: np.ndarray, assign: np.ndarray, k: int) -> np.ndarray:
    centroids = np.zeros((k, points.shape[1]), dtype=np.float64)
    np.add.at(centroids, assign, points)
    counts = np.bincount(assign, minlength=k).astype(np.float64)
    return centroids / counts[:, None]


class KMeans(BaseEstimator, ClusterMixin):
    """Seeded k-means estimator.

    Parameters
    ----------
    n_clusters : number of clusters, >= 1.
    seed : PRNG seed for the k-means++ initialization.
    max_iter : Lloyd iteration cap (default 100).

    After ``fit``: ``cluster_centers_``, ``labels_``, ``inertia_``,
    ``n_iter_`` and ``inertia_history_`` (inertia after each update step,
    non-increasing).
    """

    def __init__(self, n_clusters: int = 8, seed: int = 0, max_iter: int = 100):
        self.n_clusters = n_clusters
        self.seed = seed
        self.max_iter = max_iter

    def fit(self, X, y=None) -> "KMeans":
        if self.n_clusters < 1:
            raise ValidationError(f"n_clusters must be >= 1, got {self.n_clusters}")
        if self.max_iter < 1:
            raise ValidationError(f"max_iter must be >= 1, got {self.max_iter}")
        points = _as_points(X)
        n, dim = points.shape
        k = self.n_clusters
        if k > n:
            raise TooFewPoints(f"{n} points cannot form {k} clusters")

        rng = SplitMix64(self.seed)
        centroids = _plus_plus_init(points, k, rng)
        prev: np.ndarray | None = None
        history: list[float] = []
        iterations = 0
        while iterations < self.max_iter:
            assign = np.argmin(_sq_distances(points, centroids), axis=1)
            _fill_empty_clusters(points, assign, centroids)
            if prev is not None and np.array_equal(assign, prev):
                break
            centroids = _means(points, assign, k)
            history.append(
                float(
                    np.einsum(
                        "nd,nd->n",
                        points - centroids[assign],
                        points - centroids[assign],
                    ).sum()
                )
            )
            prev = assign
            iterations += 1
        else:
            # Iteration cap hit: restore assignment/centroid consistency.
            for _ in range(k + 1):
                assign = np.argmin(_sq_distances(points, centroids), axis=1)
                if np.bincount(assign, minlength=k).min() > 0:
                    break
                _fill_empty_clusters(points, assign, centroids)

        self.cluster_centers_ = centroids
        self.labels_ = assign
        self.n_iter_ = iterations
        self.inertia_history_ = history
        self.inertia_ = float(
            np.einsum(
                "nd,nd->n", points - centroids[assign], points - centroids[assign]
            ).sum()
        )
        self._dim = dim
        return self

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "cluster_centers_"):
            raise ValidationError("predict called before fit")
        points = _as_points(X)
        if points.shape[1] != self._dim:
            raise DimensionMismatch(
                f"model was fit on dim {self._dim}, got dim {points.shape[1]}"
            )
        return np.argmin(_sq_distances(points, self.cluster_centers_), axis=1)


__all__ = ["KMeans"]
