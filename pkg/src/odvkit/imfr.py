"""Interlaced multi-frame scheduling and fusion.

A feature sequence with ``3C`` channels per frame is split into previous,
current and next subsequences. Each target frame is first rebuilt as a
per-pixel convex mix of its three group features, then smoothed against
the previous-group feature of frame ``i + 1`` and the next-group feature of
frame ``i - 1``. Sequence ends use replicated frames.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ._validation import ShapeError, check_same_shape
from .kernels import pixel_shuffle


@dataclass(frozen=True)
class ImfrConfig:
    alpha1: float = 0.01
    beta1: float = 0.01
    normalize: bool = True

    def __post_init__(self):
        if self.alpha1 < 0 or self.beta1 < 0:
            raise ValueError("alpha1 and beta1 must be non-negative")


@dataclass(frozen=True)
class InterlacedSequences:
    """Three equal-shape ``(n, C, H, W)`` subsequences."""

    prev: np.ndarray
    curr: np.ndarray
    next: np.ndarray

    def __post_init__(self):
        check_same_shape(self.prev, self.curr, self.next, names=["prev", "curr", "next"])
        if self.curr.ndim != 4 or self.curr.shape[0] < 1:
            raise ShapeError(f"subsequences must be (n, C, H, W) with n >= 1, got {self.curr.shape}")

    def __len__(self):
        return self.curr.shape[0]


class ReplicatePadded:
    """Clamped-index view of :class:`InterlacedSequences`.

    Any index below 0 resolves to frame 0 and any index past the end
    resolves to the last frame, so ``prev(i + 1)`` and ``next(i - 1)`` are
    defined for every ``i`` without copying data.
    """

    def __init__(self, seqs):
        self.seqs = seqs

    def __len__(self):
        return len(self.seqs)

    def _clamp(self, i):
        return min(max(i, 0), len(self.seqs) - 1)

    def prev(self, i):
        return self.seqs.prev[self._clamp(i)]

    def curr(self, i):
        return self.seqs.curr[self._clamp(i)]

    def next(self, i):
        return self.seqs.next[self._clamp(i)]


def split_interlaced(seq):
    """Split ``(n, 3C, H, W)`` into channel groups ``[0, C)``, ``[C, 2C)``, ``[2C, 3C)``."""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim != 4:
        raise ShapeError(f"sequence must be (n, 3C, H, W), got {seq.shape}")
    if seq.shape[1] % 3:
        raise ShapeError(f"channel count {seq.shape[1]} is not divisible by 3")
    c = seq.shape[1] // 3
    return InterlacedSequences(seq[:, :c], seq[:, c : 2 * c], seq[:, 2 * c :])


def pad_replicate(seqs):
    return ReplicatePadded(seqs)


def constrain_weights(raw):
    """Map raw logits into ``(0, 0.5)`` with ``0.5 * sigmoid(raw)``."""
    raw = np.asarray(raw, dtype=np.float64)
    if np.any(np.isnan(raw)):
        raise ValueError("raw weights contain NaN")
    return 0.5 * expit(raw)


def mfr_combine(prev_i, curr_i, next_i, w_prev, w_next):
    """Per-pixel convex mix ``(1 - wP - wN) * curr + wP * prev + wN * next``."""
    prev_i, curr_i, next_i = (np.asarray(a, dtype=np.float64) for a in (prev_i, curr_i, next_i))
    check_same_shape(prev_i, curr_i, next_i, names=["prev", "curr", "next"])
    w_prev = np.asarray(w_prev, dtype=np.float64)
    w_next = np.asarray(w_next, dtype=np.float64)
    for name, w in (("w_prev", w_prev), ("w_next", w_next)):
        try:
            np.broadcast_shapes(w.shape, curr_i.shape)
        except ValueError:
            raise ShapeError(f"{name} shape {w.shape} does not broadcast to {curr_i.shape}") from None
        if w.size and (w.min() < 0.0 or w.max() > 0.5):
            raise ValueError(f"{name} must lie in [0, 0.5]")
    return (1.0 - w_prev - w_next) * curr_i + w_prev * prev_i + w_next * next_i


def fuse(prev_of_next, curr, next_of_prev, cfg=ImfrConfig()):
    """Temporal smoothing ``alpha1 * P[i+1] + C[i] + beta1 * N[i-1]``.

    With ``cfg.normalize`` the sum is divided by ``1 + alpha1 + beta1`` so
    constant signals pass through unchanged.
    """
    arrays = [np.asarray(a, dtype=np.float64) for a in (prev_of_next, curr, next_of_prev)]
    check_same_shape(*arrays, names=["prev_of_next", "curr", "next_of_prev"])
    raw = cfg.alpha1 * arrays[0] + arrays[1] + cfg.beta1 * arrays[2]
    if cfg.normalize:
        raw = raw / (1.0 + cfg.alpha1 + cfg.beta1)
    return raw


def imfr_pipeline(seq, raw_weights=None, cfg=ImfrConfig(), upscale=1):
    """Run split, weight constraint, per-frame mixing, optional pixel shuffle and fusion.

    Parameters
    ----------
    seq : array_like, shape (n, 3C, H, W)
    raw_weights : array_like, shape (n, 2, C or 1, H, W), optional
        Pre-activation weights for the previous and next groups. ``None``
        means all zeros, i.e. both weights equal 0.25.
    cfg : ImfrConfig
    upscale : int
        Pixel-shuffle factor applied to all three subsequences after
        mixing; requires ``C`` divisible by ``upscale**2``.

    Returns
    -------
    ndarray, shape (n, C / upscale**2, upscale * H, upscale * W)
    """
    seqs = split_interlaced(seq)
    n, c, h, w = seqs.curr.shape
    if raw_weights is None:
        raw_weights = np.zeros((n, 2, 1, h, w))
    raw_weights = np.asarray(raw_weights, dtype=np.float64)
    if raw_weights.ndim != 5 or raw_weights.shape[:2] != (n, 2) or raw_weights.shape[3:] != (h, w):
        raise ShapeError(f"raw_weights must be ({n}, 2, C or 1, {h}, {w}), got {raw_weights.shape}")
    weights = constrain_weights(raw_weights)

    mixed = np.stack(
        [mfr_combine(seqs.prev[i], seqs.curr[i], seqs.next[i], weights[i, 0], weights[i, 1]) for i in range(n)]
    )
    prev, nxt = seqs.prev, seqs.next
    if upscale != 1:
        mixed, prev, nxt = (np.stack([pixel_shuffle(f, upscale) for f in s]) for s in (mixed, prev, nxt))
    padded = pad_replicate(InterlacedSequences(prev, mixed, nxt))
    return np.stack([fuse(padded.prev(i + 1), padded.curr(i), padded.next(i - 1), cfg) for i in range(n)])
