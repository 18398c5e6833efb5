"""Shared fixtures and independent oracles.

The oracle helpers here re-derive expected values from first principles
(brute force, finite differences) and must never call the code paths they
check.
"""

from __future__ import annotations

import numpy as np
import pytest

from openlabel import SynthConfig, generate
from openlabel.bundle import DatasetBundle, LabelEntry, VideoRecord
from openlabel.discovery import AttributeProfile


def make_profile(owner, indices, scores=None) -> AttributeProfile:
    if scores is None:
        scores = [0.0] * len(indices)
    return AttributeProfile(
        owner=owner, entries=tuple(zip([int(i) for i in indices], scores))
    )


def brute_force_sim(source: list[int], target: list[int]) -> float:
    """Direct re-evaluation of the position-weighted overlap.

    Weights come from min-max normalizing [n-1, ..., 0]; every pair of
    equal attributes contributes the weight at its absolute rank offset,
    offsets past the table contribute nothing, and the total is divided
    by the source length.  Deliberately written as plain nested loops.
    """
    n = len(source)
    if n == 1:
        weights = [1.0]
    else:
        ref = [n - 1 - i for i in range(n)]
        lo, hi = min(ref), max(ref)
        weights = [(r - lo) / (hi - lo) for r in ref]
    score = 0.0
    for i_s, a_s in enumerate(source):
        for i_t, a_t in enumerate(target):
            if a_s != a_t:
                continue
            offset = abs(i_t - i_s)
            if offset < n:
                score += weights[offset]
    return score / n


def fd_grads(fn, W: np.ndarray, b: np.ndarray, h: float = 1e-5):
    """Central finite-difference gradients of fn(W, b) -> float."""
    gW = np.zeros_like(W)
    for i in range(W.shape[0]):
        for j in range(W.shape[1]):
            Wp, Wm = W.copy(), W.copy()
            Wp[i, j] += h
            Wm[i, j] -= h
            gW[i, j] = (fn(Wp, b) - fn(Wm, b)) / (2 * h)
    gb = np.zeros_like(b)
    for i in range(b.shape[0]):
        bp, bm = b.copy(), b.copy()
        bp[i] += h
        bm[i] -= h
        gb[i] = (fn(W, bp) - fn(W, bm)) / (2 * h)
    return gW, gb


def unit(v) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    return arr / np.linalg.norm(arr)


def make_tiny_bundle(dim: int = 4) -> DatasetBundle:
    """Smallest legal bundle: one shared label, one source, one target."""
    eye = np.eye(dim, dtype=np.float32)
    return DatasetBundle(
        dim=dim,
        shared_labels=(LabelEntry(name="walk", embedding_index=0),),
        attribute_vocab=("leg", "street"),
        videos=(
            VideoRecord(
                id="s0",
                domain="source",
                embedding_index=0,
                frames=((0, 1),),
                true_label="walk",
            ),
            VideoRecord(id="t0", domain="target", embedding_index=1, frames=((1,),)),
        ),
        video_embeddings=eye[:2],
        label_embeddings=eye[:1],
        attribute_embeddings=eye[:2],
    )


@pytest.fixture(scope="session")
def easy_bundle():
    """Well-separated synthetic bundle: 3 shared + 2 private classes."""
    return generate(
        SynthConfig(
            shared_classes=3,
            private_classes=2,
            videos_per_class=10,
            sigma=0.05,
            seed=13,
        )
    )
