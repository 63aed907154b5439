"""Side-information estimation by motion-compensated interpolation.

The decoder guesses each WZ frame from two already decoded references:
forward motion estimation at 16x16, bidirectional half-pel refinement at
16x16 then 8x8, weighted vector median smoothing, and bidirectional
compensation.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from apps.frames.frames import Frame
from apps.sideinfo.motion import (
    SearchConfig,
    backward_offsets,
    bidirectional_me,
    check_references,
    compensate_plane,
    forward_me,
    smooth_motion,
    upsample,
)

logger = logging.getLogger(__name__)

REFINED_BLOCK = 8


@dataclass(frozen=True, eq=False)
class InterpolationContext:
    x_b: Frame
    x_f: Frame
    tau: float = 0.5

    def __post_init__(self):
        if not 0 < self.tau < 1:
            raise ValueError(f"tau must lie strictly between 0 and 1, got {self.tau}")
        check_references(self.x_b, self.x_f)


class InterpolationStep(NamedTuple):
    target: int
    backward: int
    forward: int
    tau: Fraction


@dataclass(frozen=True, eq=False)
class SideInformation:
    frame: Frame
    residual: np.ndarray
    field: object


def plan_interpolation(gop):
    """Hierarchical interpolation order for one GOP.

    Indices are relative to the GOP's key frame (0); the next key frame is
    `gop`. Each step's references are keys or frames interpolated earlier.

    Returns:
        steps (list): InterpolationStep(target, backward, forward, tau)

    """
    if gop < 1:
        raise ValueError(f"GOP size must be >= 1, got {gop}")
    steps = []

    def split(lo, hi):
        if hi - lo < 2:
            return
        mid = (lo + hi) // 2
        steps.append(InterpolationStep(mid, lo, hi, Fraction(mid - lo, hi - lo)))
        split(lo, mid)
        split(mid, hi)

    split(0, gop)
    return steps


def predictions(ctx, field, halfpel_xb=None, halfpel_xf=None):
    """Motion-compensated predictions (P_b, P_f) as float planes."""
    if halfpel_xb is None:
        halfpel_xb, halfpel_xf = upsample(ctx.x_b.luma), upsample(ctx.x_f.luma)
    p_b = compensate_plane(halfpel_xb, field.block, backward_offsets(field.vectors, ctx.tau))
    p_f = compensate_plane(halfpel_xf, field.block, field.vectors)
    return p_b, p_f


def interpolate(ctx, field, halfpel_xb=None, halfpel_xf=None):
    """Side-information frame: weighted average of the two predictions."""
    p_b, p_f = predictions(ctx, field, halfpel_xb, halfpel_xf)
    tau = float(ctx.tau)
    mixed = np.floor((1.0 - tau) * p_b + tau * p_f + 0.5)
    return Frame(np.clip(mixed, 0, 255).astype(np.uint8), ctx.x_b.index)


def residual_frame(ctx, field, halfpel_xb=None, halfpel_xf=None):
    """Half difference of the two predictions, the correlation-noise proxy."""
    p_b, p_f = predictions(ctx, field, halfpel_xb, halfpel_xf)
    return (p_b - p_f) / 2.0


def average_interpolation(ctx):
    """Baseline SI without motion: the tau-weighted pixel average."""
    tau = float(ctx.tau)
    mixed = (1.0 - tau) * ctx.x_b.luma.astype(np.float64) + tau * ctx.x_f.luma
    return Frame(np.clip(np.floor(mixed + 0.5), 0, 255).astype(np.uint8))


def motion_field(ctx, cfg=None):
    """Forward search, two bidirectional passes and smoothing.

    Returns:
        (field, halfpel_xb, halfpel_xf): the final 8x8 field and the
        upsampled references it was measured on

    """
    cfg = cfg or SearchConfig()
    halfpel_xb, halfpel_xf = upsample(ctx.x_b.luma), upsample(ctx.x_f.luma)
    fwd = forward_me(ctx, cfg.block, cfg.search_range)
    coarse = bidirectional_me(ctx, fwd, cfg.block, halfpel_xb, halfpel_xf, cfg)
    fine = bidirectional_me(ctx, coarse, REFINED_BLOCK, halfpel_xb, halfpel_xf, cfg)
    smoothed = smooth_motion(fine, ctx, halfpel_xb, halfpel_xf)
    return smoothed, halfpel_xb, halfpel_xf


def estimate(ctx, cfg=None, index=None):
    """Side information, residual and field for one interpolation step."""
    field, halfpel_xb, halfpel_xf = motion_field(ctx, cfg)
    frame = interpolate(ctx, field, halfpel_xb, halfpel_xf)
    if index is not None:
        frame = frame.with_index(index)
    residual = residual_frame(ctx, field, halfpel_xb, halfpel_xf)
    logger.debug(f"Side information for frame {frame.index}: mean SAD {field.cost.mean():.1f}")
    return SideInformation(frame, residual, field)
