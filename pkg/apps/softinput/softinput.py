"""Soft inputs for the LDPCA decoder.

For the bit plane being decoded, the probability of each bit value is the
Laplacian mass, centred on the side-information coefficient, of the
coefficient interval that value would select given the planes already
decoded above it. Everything is carried in the log domain so far-off
intervals keep a usable ratio instead of underflowing to zero.

Plane numbering here is by significance: b = 0 is the LSB and b = L - 1
the MSB, which for AC bands is the sign.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from apps.common.errors import MissingPlane, WrongBand, WrongPlane
from apps.ldpca.ldpca import LLR_CLAMP
from apps.quantizer.quantizer import plane_count

LOG_HALF = math.log(0.5)


@dataclass(frozen=True, eq=False)
class PlaneContext:
    """Everything needed to score one bit plane of one band.

    decoded maps significance b -> bit array for planes already decoded.
    """

    band: int
    plane: int
    levels: int
    step: float
    y: np.ndarray
    alpha: np.ndarray
    decoded: dict = field(default_factory=dict)
    # SI coefficients quantized with this band's step, for the sign plane
    y_q: np.ndarray | None = None

    @property
    def bit_count(self):
        return plane_count(self.levels)

    @property
    def is_dc(self):
        return self.band == 0

    @property
    def is_sign_plane(self):
        return not self.is_dc and self.plane == self.bit_count - 1


def partial_value(decoded, b, L, signed=False):
    """Magnitude already fixed by the planes above b.

    Args:
        decoded (dict): significance -> bit array
        b (int): plane being decoded
        L (int): bits per bin, including the sign bit when signed
        signed (bool): skip the sign plane at L - 1

    Returns:
        x_p: integer array (or int) of the decoded high-order magnitude

    """
    top = L - 1 if signed else L
    value = 0
    for significance in range(b + 1, top):
        if significance not in decoded:
            raise MissingPlane(f"plane {significance} is needed before plane {b}")
        value = value + (np.asarray(decoded[significance], dtype=np.int64) << significance)
    return value


def log_laplace_mass(lo, hi, y, alpha):
    """log of the Laplacian(y, alpha) probability of [lo, hi)."""
    lo, hi, y, alpha = np.broadcast_arrays(
        *(np.asarray(v, dtype=np.float64) for v in (lo, hi, y, alpha))
    )
    with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
        d_lo, d_hi = lo - y, hi - y
        tail = np.log1p(-np.exp(-alpha * (hi - lo)))
        above = LOG_HALF - alpha * d_lo + tail
        below = LOG_HALF + alpha * d_hi + tail
        straddle = np.log1p(-0.5 * np.exp(alpha * d_lo) - 0.5 * np.exp(-alpha * d_hi))
        result = np.where(d_lo >= 0, above, np.where(d_hi <= 0, below, straddle))
    result = np.where(hi <= lo, -np.inf, result)
    return result if result.ndim else float(result)


def laplace_mass(lo, hi, y, alpha):
    """Probability of [lo, hi) under a Laplacian centred on y."""
    return np.exp(log_laplace_mass(lo, hi, y, alpha))


def _positions(values, pos):
    values = np.asarray(values, dtype=np.float64)
    return values if pos is None else values[pos]


def _decoded(ctx, pos):
    return {b: _positions(bits, pos).astype(np.int64) for b, bits in ctx.decoded.items()}


def _bit_log_masses(ctx, pos, sign):
    b = ctx.plane
    x_p = partial_value(_decoded(ctx, pos), b, ctx.bit_count, signed=not ctx.is_dc)
    y = _positions(ctx.y, pos)
    alpha = _positions(ctx.alpha, pos)
    lo0, mid, hi1 = ((x_p + k * (1 << b)) * ctx.step for k in (0, 1, 2))
    # a negative sign mirrors each magnitude interval about zero
    positive = np.broadcast_to(np.asarray(sign) > 0, np.shape(y))
    intervals = (
        (np.where(positive, lo0, -mid), np.where(positive, mid, -lo0)),
        (np.where(positive, mid, -hi1), np.where(positive, hi1, -mid)),
    )
    return tuple(log_laplace_mass(lo, hi, y, alpha) for lo, hi in intervals)


def dc_log_masses(ctx, pos=None):
    if not ctx.is_dc:
        raise WrongBand(f"band {ctx.band} is not the DC band")
    return _bit_log_masses(ctx, pos, 1.0)


def dc_bit_probabilities(ctx, pos=None):
    """Unnormalized (P0, P1) for a DC plane, all positions or `pos`."""
    return tuple(np.exp(mass) for mass in dc_log_masses(ctx, pos))


def decoded_sign(ctx, pos=None):
    top = ctx.bit_count - 1
    if top not in ctx.decoded:
        raise MissingPlane(f"band {ctx.band} sign plane is not decoded yet")
    return np.where(_positions(ctx.decoded[top], pos) == 1, -1.0, 1.0)


def ac_log_masses(ctx, pos=None, sign=None):
    if ctx.is_dc:
        raise WrongBand("the DC band has no sign-magnitude planes")
    if ctx.is_sign_plane:
        raise WrongPlane(f"plane {ctx.plane} of band {ctx.band} is the sign plane")
    if sign is None:
        sign = decoded_sign(ctx, pos)
    return _bit_log_masses(ctx, pos, sign)


def ac_bit_probabilities(ctx, pos=None, sign=None):
    """Unnormalized (P0, P1) for an AC magnitude plane.

    sign defaults to the decoded sign plane.
    """
    return tuple(np.exp(mass) for mass in ac_log_masses(ctx, pos, sign))


def sign_log_masses(ctx, pos=None):
    """Sign-plane masses as literal sums over the quantizer bins.

    The SI bin y_q is compared against every nonnegative bin (bit 0) and
    every negative bin (bit 1). alpha is fitted on coefficient values while
    these sums run over bin indices one step W apart, so the decay rate
    per bin is alpha * W; with W = 1 it is alpha itself.
    """
    if ctx.is_dc:
        raise WrongBand("the DC band has no sign plane")
    if not ctx.is_sign_plane:
        raise WrongPlane(f"plane {ctx.plane} of band {ctx.band} is not the sign plane")
    if ctx.y_q is None:
        raise MissingPlane("the sign plane needs the quantized side information")
    y_q = _positions(ctx.y_q, pos)[..., None]
    rate = (_positions(ctx.alpha, pos) * ctx.step)[..., None]
    bins = np.arange(ctx.levels // 2)
    weight = np.log(rate / 2.0)
    positive = weight - rate * np.abs(bins - y_q)
    negative = weight - rate * np.abs(-bins[1:] - y_q)
    return logsumexp(positive, axis=-1), logsumexp(negative, axis=-1)


def ac_sign_probability(ctx, pos=None):
    """Unnormalized (P0, P1) for the sign plane; P1 means negative."""
    return tuple(np.exp(mass) for mass in sign_log_masses(ctx, pos))


def llr_from_log_masses(log_p0, log_p1):
    """ln(P0 / P1) clamped to the decoder range; no information gives 0."""
    log_p0, log_p1 = np.broadcast_arrays(np.asarray(log_p0, float), np.asarray(log_p1, float))
    with np.errstate(invalid="ignore"):
        ratio = log_p0 - log_p1
    ratio = np.where(np.isneginf(log_p0) & np.isneginf(log_p1), 0.0, ratio)
    return np.clip(ratio, -LLR_CLAMP, LLR_CLAMP)


def llr(p0, p1):
    """LLR from plain probabilities; P0 + P1 below 1e-300 is no information."""
    p0, p1 = np.asarray(p0, dtype=np.float64), np.asarray(p1, dtype=np.float64)
    with np.errstate(divide="ignore"):
        result = llr_from_log_masses(np.log(p0), np.log(p1))
    return np.where(p0 + p1 < 1e-300, 0.0, result)


def plane_llrs(ctx):
    """LLR of every position of the plane described by ctx."""
    if ctx.is_dc:
        masses = dc_log_masses(ctx)
    elif ctx.is_sign_plane:
        masses = sign_log_masses(ctx)
    else:
        masses = ac_log_masses(ctx)
    return llr_from_log_masses(*masses)
