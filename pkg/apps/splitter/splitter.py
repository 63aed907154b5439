"""Adaptive GOP splitting driven by cheap motion-activity metrics.

No motion estimation happens here: the four metrics below only look at
histograms and block statistics so the encoder stays light.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from apps.common.errors import BadBlockSize, DimensionMismatch, EmptySequence

logger = logging.getLogger(__name__)

BINS = 256


@dataclass(frozen=True)
class ActivityConfig:
    threshold: float = 0.35
    max_gop: int = 8
    weights: tuple = (0.25, 0.25, 0.25, 0.25)
    block_size: int = 8
    deviation: int = 2

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if self.threshold < 0:
            raise ValueError(f"threshold must be >= 0, got {self.threshold}")
        if not 1 <= self.max_gop <= 8:
            raise ValueError(f"max_gop must be in [1, 8], got {self.max_gop}")
        if len(self.weights) != 4 or min(self.weights) < 0:
            raise ValueError(f"need four nonnegative weights, got {self.weights}")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)}")
        if self.block_size <= 0:
            raise BadBlockSize(f"block size must be positive, got {self.block_size}")

    @classmethod
    def from_settings(cls, **overrides):
        from django.conf import settings

        values = {
            "threshold": settings.WZ_GOP_THRESHOLD,
            "max_gop": settings.WZ_MAX_GOP,
            "weights": tuple(settings.WZ_ACTIVITY_WEIGHTS),
            "block_size": settings.WZ_ACTIVITY_BLOCK,
            "deviation": settings.WZ_DEVIATION_THRESHOLD,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class GopPlan:
    sizes: tuple = field(default_factory=tuple)

    @property
    def total(self):
        return sum(self.sizes)

    def starts(self):
        """Index of the key frame opening each GOP."""
        return [int(s) for s in np.cumsum((0,) + tuple(self.sizes[:-1]))]

    def key_indices(self):
        return self.starts()


def _check_pair(f1, f2):
    if f1.shape != f2.shape:
        raise DimensionMismatch(
            f"cannot compare {f1.width}x{f1.height} with {f2.width}x{f2.height}"
        )


def _blocks(frame, block):
    """Reshape a frame into (block count, block*block) samples, raster order."""
    if block <= 0 or frame.width % block or frame.height % block:
        raise BadBlockSize(
            f"block {block} does not divide {frame.width}x{frame.height}"
        )
    rows, cols = frame.height // block, frame.width // block
    tiles = frame.luma.reshape(rows, block, cols, block).swapaxes(1, 2)
    return tiles.reshape(rows * cols, block * block)


def _block_histograms(tiles):
    count = tiles.shape[0]
    offsets = (np.arange(count, dtype=np.int64) * BINS)[:, None]
    flat = (tiles.astype(np.int64) + offsets).ravel()
    return np.bincount(flat, minlength=count * BINS).reshape(count, BINS)


def diff_of_histograms(f1, f2):
    """Half the L1 distance between the two luma histograms, over N pixels."""
    _check_pair(f1, f2)
    h1 = np.bincount(f1.luma.ravel(), minlength=BINS)
    h2 = np.bincount(f2.luma.ravel(), minlength=BINS)
    pixels = f1.luma.size
    return float(np.abs(h1 - h2).sum() / (2.0 * pixels))


def histogram_of_difference(f1, f2, deviation=2):
    """Share of pixels whose absolute difference exceeds the deviation."""
    _check_pair(f1, f2)
    diff = f1.luma.astype(np.int16) - f2.luma.astype(np.int16)
    return float(np.count_nonzero(np.abs(diff) > deviation) / diff.size)


def block_histogram_difference(f1, f2, block=8):
    """Mean over co-located blocks of the per-block histogram difference."""
    _check_pair(f1, f2)
    t1, t2 = _blocks(f1, block), _blocks(f2, block)
    h1, h2 = _block_histograms(t1), _block_histograms(t2)
    per_block = np.abs(h1 - h2).sum(axis=1) / (2.0 * block * block)
    return float(per_block.mean())


def block_variance_difference(f1, f2, block=8):
    """Mean over co-located blocks of |var1 - var2|, scaled by 255^2."""
    _check_pair(f1, f2)
    v1 = _blocks(f1, block).astype(np.float64).var(axis=1)
    v2 = _blocks(f2, block).astype(np.float64).var(axis=1)
    return float(np.mean(np.abs(v1 - v2)) / 255.0**2)


def motion_activity(f1, f2, cfg=None):
    """Weighted sum of the four activity metrics for one frame pair."""
    cfg = cfg or ActivityConfig()
    w_doh, w_hod, w_bhd, w_bvd = cfg.weights
    activity = 0.0
    # zero-weight metrics are skipped so a degenerate weighting is exact
    if w_doh:
        activity += w_doh * diff_of_histograms(f1, f2)
    if w_hod:
        activity += w_hod * histogram_of_difference(f1, f2, cfg.deviation)
    if w_bhd:
        activity += w_bhd * block_histogram_difference(f1, f2, cfg.block_size)
    if w_bvd:
        activity += w_bvd * block_variance_difference(f1, f2, cfg.block_size)
    return activity


def fixed_plan(count, size):
    """Split count frames into GOPs of a fixed size; the last may be short."""
    if count <= 0:
        raise EmptySequence("cannot plan GOPs for an empty sequence")
    if size < 1:
        raise ValueError(f"GOP size must be >= 1, got {size}")
    sizes = [size] * (count // size)
    if count % size:
        sizes.append(count % size)
    return GopPlan(tuple(sizes))


def plan_gops(seq, cfg=None, fixed=None):
    """Greedy GOP plan over a sequence.

    Args:
        seq (Sequence): frames to split
        cfg (ActivityConfig): activity threshold, GOP cap and metric weights
        fixed (int): bypass the metrics and use GOPs of this length

    Returns:
        plan (GopPlan): GOP lengths summing to the frame count

    Notes:
        A GOP closes when the cumulative activity including the next frame
        pair would reach the threshold, or when it hits max_gop frames.

    """
    if not len(seq):
        raise EmptySequence("cannot plan GOPs for an empty sequence")
    if fixed is not None:
        plan = fixed_plan(len(seq), fixed)
        logger.info(f"Fixed GOP plan: {plan.sizes}")
        return plan

    cfg = cfg or ActivityConfig()
    sizes = []
    size, cumulative = 1, 0.0
    for index in range(1, len(seq)):
        activity = motion_activity(seq[index - 1], seq[index], cfg)
        if size >= cfg.max_gop or cumulative + activity >= cfg.threshold:
            sizes.append(size)
            size, cumulative = 1, 0.0
        else:
            size += 1
            cumulative += activity
    sizes.append(size)

    plan = GopPlan(tuple(sizes))
    logger.info(f"Adaptive GOP plan: {plan.sizes}")
    return plan
