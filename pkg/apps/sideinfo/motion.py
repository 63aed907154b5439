"""Block motion estimation for side-information interpolation.

Vectors are stored in half-pel units as (dx, dy). A forward field maps
each block of the forward reference to its match in the backward
reference. A bidirectional field stores, for each block of the frame being
interpolated, the offset into the forward reference; the backward offset
follows from tau.
"""

import itertools
import logging
from dataclasses import dataclass

import numpy as np

from apps.common.errors import BadBlockSize, DimensionMismatch

logger = logging.getLogger(__name__)

FORWARD = "forward"
BIDIRECTIONAL = "bidirectional"


@dataclass(frozen=True)
class SearchConfig:
    block: int = 16
    search_range: int = 32
    refine_range: int = 2
    wide_refine_range: int = 4
    disagreement: int = 4

    def __post_init__(self):
        if self.block <= 0 or self.block % 2:
            raise BadBlockSize(f"block must be a positive even size, got {self.block}")
        if min(self.search_range, self.refine_range, self.wide_refine_range) < 0:
            raise ValueError("search ranges must be >= 0")

    @classmethod
    def from_settings(cls, **overrides):
        from django.conf import settings

        values = {
            "search_range": settings.WZ_SEARCH_RANGE,
            "refine_range": settings.WZ_REFINE_RANGE,
            "wide_refine_range": settings.WZ_WIDE_REFINE_RANGE,
            "disagreement": settings.WZ_NEIGHBOR_DISAGREEMENT,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True, eq=False)
class MotionField:
    """Per-block vectors (rows, cols, 2) as (dx, dy) half-pel, plus SAD."""

    block: int
    vectors: np.ndarray
    cost: np.ndarray
    kind: str = FORWARD

    @property
    def rows(self):
        return self.vectors.shape[0]

    @property
    def cols(self):
        return self.vectors.shape[1]

    def centers(self):
        """Block centers in pixels, (rows * cols, 2) as (x, y), raster order."""
        y, x = np.mgrid[0 : self.rows, 0 : self.cols]
        half = (self.block - 1) / 2.0
        return np.stack([x.ravel() * self.block + half, y.ravel() * self.block + half], axis=1)


def check_references(x_b, x_f):
    if x_b.shape != x_f.shape:
        raise DimensionMismatch(
            f"references differ: {x_b.width}x{x_b.height} vs {x_f.width}x{x_f.height}"
        )


def upsample(plane):
    """Bilinear half-pel plane, 2H x 2W, edges replicated.

    up[2i, 2j] is sample (i, j); odd rows and columns average neighbors.
    """
    plane = np.asarray(plane, dtype=np.float64)
    padded = np.pad(plane, ((0, 1), (0, 1)), mode="edge")
    height, width = plane.shape
    up = np.empty((2 * height, 2 * width))
    up[0::2, 0::2] = plane
    up[1::2, 0::2] = (padded[:-1, :-1] + padded[1:, :-1]) / 2.0
    up[0::2, 1::2] = (padded[:-1, :-1] + padded[:-1, 1:]) / 2.0
    up[1::2, 1::2] = (
        padded[:-1, :-1] + padded[1:, :-1] + padded[:-1, 1:] + padded[1:, 1:]
    ) / 4.0
    return up


def compensate(up, block, vectors):
    """Gather block predictions from a half-pel plane.

    Args:
        up (ndarray): plane from upsample()
        block (int): block size in pixels
        vectors (ndarray): (rows, cols, 2) half-pel offsets

    Returns:
        blocks (ndarray): (rows * cols, block, block) predictions

    """
    rows, cols = vectors.shape[:2]
    by, bx = np.mgrid[0:rows, 0:cols]
    steps = 2 * np.arange(block)
    top = (2 * block * by + vectors[..., 1]).reshape(-1, 1) + steps
    left = (2 * block * bx + vectors[..., 0]).reshape(-1, 1) + steps
    top = np.clip(top, 0, up.shape[0] - 1)
    left = np.clip(left, 0, up.shape[1] - 1)
    return up[top[:, :, None], left[:, None, :]]


def compensate_plane(up, block, vectors):
    """Same as compensate() but reassembled into a full plane."""
    rows, cols = vectors.shape[:2]
    blocks = compensate(up, block, vectors)
    return blocks.reshape(rows, cols, block, block).swapaxes(1, 2).reshape(
        rows * block, cols * block
    )


def _block_sums(plane, block):
    rows, cols = plane.shape[0] // block, plane.shape[1] // block
    return plane.reshape(rows, block, cols, block).sum(axis=(1, 3))


def search_order(radius):
    """Offsets within +-radius ordered by |dx|+|dy|, then dy, then dx."""
    offsets = itertools.product(range(-radius, radius + 1), repeat=2)
    return sorted(
        ((dx, dy) for dy, dx in offsets), key=lambda d: (abs(d[0]) + abs(d[1]), d[1], d[0])
    )


def forward_me(ctx, block=16, search_range=32):
    """Full-search integer-pel block matching of x_f blocks into x_b.

    Windows that leave x_b are not candidates. Ties go to the offset
    earliest in search_order().

    Returns:
        field (MotionField): offsets from each x_f block to its x_b match

    """
    check_references(ctx.x_b, ctx.x_f)
    x_b = ctx.x_b.luma.astype(np.int32)
    x_f = ctx.x_f.luma.astype(np.int32)
    height, width = x_f.shape
    rows, cols = height // block, width // block
    top = np.arange(rows)[:, None] * block
    left = np.arange(cols)[None, :] * block

    best = np.full((rows, cols), np.iinfo(np.int64).max, dtype=np.int64)
    vectors = np.zeros((rows, cols, 2), dtype=np.int64)
    shifted = np.empty_like(x_b)
    for dx, dy in search_order(search_range):
        valid = (
            (top + dy >= 0)
            & (top + dy + block <= height)
            & (left + dx >= 0)
            & (left + dx + block <= width)
        )
        if not valid.any():
            continue
        shifted.fill(0)
        src_y = slice(max(0, dy), min(height, height + dy))
        dst_y = slice(max(0, -dy), min(height, height - dy))
        src_x = slice(max(0, dx), min(width, width + dx))
        dst_x = slice(max(0, -dx), min(width, width - dx))
        shifted[dst_y, dst_x] = x_b[src_y, src_x]
        sad = _block_sums(np.abs(x_f - shifted), block)
        better = valid & (sad < best)
        best[better] = sad[better]
        vectors[better] = (2 * dx, 2 * dy)

    logger.debug(f"Forward ME {cols}x{rows} blocks, mean SAD {best.mean():.1f}")
    return MotionField(block, vectors, best, FORWARD)


def backward_offsets(forward_vectors, tau):
    """Backward-reference offsets implied by forward ones on a linear path."""
    tau = float(tau)
    return np.rint(-forward_vectors * tau / (1.0 - tau)).astype(np.int64)


def bidirectional_sad(ctx, block, vectors, up_b, up_f):
    p_b = compensate(up_b, block, backward_offsets(vectors, ctx.tau))
    p_f = compensate(up_f, block, vectors)
    return np.abs(p_b - p_f).sum(axis=(1, 2)).reshape(vectors.shape[:2])


def _select_trajectories(fwd, rows, cols, block, tau):
    """Forward vector whose motion line crosses nearest each block center."""
    tau = float(tau)
    crossing = fwd.centers() + fwd.vectors.reshape(-1, 2) / 2.0 * (1.0 - tau)
    y, x = np.mgrid[0:rows, 0:cols]
    half = (block - 1) / 2.0
    centers = np.stack([x.ravel() * block + half, y.ravel() * block + half], axis=1)
    distance = np.linalg.norm(centers[:, None, :] - crossing[None, :, :], axis=2)
    chosen = np.argmin(distance, axis=1)
    motion = -fwd.vectors.reshape(-1, 2)[chosen]
    return np.rint(motion * (1.0 - tau)).astype(np.int64).reshape(rows, cols, 2)


def _refine_radius(vectors, cfg):
    """Per-block half-pel window, widened where a 4-neighbor disagrees."""
    padded = np.pad(vectors, ((1, 1), (1, 1), (0, 0)), mode="edge")
    center = padded[1:-1, 1:-1]
    spread = np.zeros(vectors.shape[:2], dtype=np.int64)
    for dy, dx in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        neighbor = padded[1 + dy : padded.shape[0] - 1 + dy, 1 + dx : padded.shape[1] - 1 + dx]
        spread = np.maximum(spread, np.abs(neighbor - center).max(axis=2))
    return np.where(spread > cfg.disagreement, cfg.wide_refine_range, cfg.refine_range)


def bidirectional_me(ctx, fwd, block, halfpel_xb, halfpel_xf, cfg=None):
    """Bidirectional half-pel motion field for the interpolated frame.

    Args:
        ctx (InterpolationContext): references and tau
        fwd (MotionField): a forward field, or a bidirectional field at
            twice this block size whose vectors seed the children
        block (int): block size of this pass
        halfpel_xb, halfpel_xf (ndarray): upsample() of each reference
        cfg (SearchConfig): refinement windows

    Returns:
        field (MotionField): forward-reference offsets per block with the
        SAD between the two compensated predictions

    """
    check_references(ctx.x_b, ctx.x_f)
    cfg = cfg or SearchConfig()
    rows, cols = ctx.x_f.height // block, ctx.x_f.width // block

    if fwd.kind == BIDIRECTIONAL:
        if fwd.block != 2 * block:
            raise BadBlockSize(f"cannot split {fwd.block}x{fwd.block} vectors into {block}x{block}")
        initial = np.repeat(np.repeat(fwd.vectors, 2, axis=0), 2, axis=1)
    else:
        initial = _select_trajectories(fwd, rows, cols, block, ctx.tau)

    radius = _refine_radius(initial, cfg)
    best_cost = bidirectional_sad(ctx, block, initial, halfpel_xb, halfpel_xf)
    best = initial.copy()
    for dx, dy in search_order(int(radius.max()))[1:]:
        allowed = (abs(dx) <= radius) & (abs(dy) <= radius)
        if not allowed.any():
            continue
        candidate = initial + np.array([dx, dy])
        cost = bidirectional_sad(ctx, block, candidate, halfpel_xb, halfpel_xf)
        better = allowed & (cost < best_cost)
        best_cost[better] = cost[better]
        best[better] = candidate[better]

    return MotionField(block, best, best_cost, BIDIRECTIONAL)


def smooth_motion(field, ctx, halfpel_xb=None, halfpel_xf=None):
    """Weighted vector median over each 3x3 block neighborhood.

    A neighbor weighs 1 / (1 + SAD / block area). Ties keep the block's own
    vector, otherwise the first candidate in raster order. Costs are
    recomputed for the smoothed vectors.
    """
    area = float(field.block * field.block)
    weights = 1.0 / (1.0 + field.cost / area)
    vectors = field.vectors.astype(np.float64)
    rows, cols = field.rows, field.cols
    smoothed = field.vectors.copy()
    for row in range(rows):
        for col in range(cols):
            r0, r1 = max(0, row - 1), min(rows, row + 2)
            c0, c1 = max(0, col - 1), min(cols, col + 2)
            candidates = vectors[r0:r1, c0:c1].reshape(-1, 2)
            w = weights[r0:r1, c0:c1].ravel()
            gaps = np.linalg.norm(candidates[:, None, :] - candidates[None, :, :], axis=2)
            score = gaps @ w
            own = (row - r0) * (c1 - c0) + (col - c0)
            winner = own if score[own] <= score.min() + 1e-9 else int(np.argmin(score))
            smoothed[row, col] = field.vectors[r0:r1, c0:c1].reshape(-1, 2)[winner]

    if halfpel_xb is None:
        halfpel_xb, halfpel_xf = upsample(ctx.x_b.luma), upsample(ctx.x_f.luma)
    cost = bidirectional_sad(ctx, field.block, smoothed, halfpel_xb, halfpel_xf)
    return MotionField(field.block, smoothed, cost, field.kind)
