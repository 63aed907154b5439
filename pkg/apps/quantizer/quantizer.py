"""Band quantization and bit-plane extraction for WZ frames.

The DC band uses a uniform quantizer over the fixed range [0, 1024). AC
bands use a dead-zone quantizer whose zero bin is twice as wide as the
others; their dynamic range is measured per frame and sent to the decoder.
Bit planes are emitted most significant first, with the sign plane leading
for AC bands.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from apps.common.errors import (
    BadLevels,
    BinOutOfRange,
    InconsistentPlaneCount,
)
from apps.transform.transform import DC_RANGE, ZIGZAG_RASTER

# Level counts per coefficient of the 4x4 block, row by row; 0 means the
# coefficient is not coded.
QUANT_GRIDS = {
    8: (128, 64, 32, 16, 64, 32, 16, 8, 32, 16, 8, 4, 16, 8, 4, 0),
    7: (64, 32, 16, 8, 32, 16, 8, 4, 16, 8, 4, 4, 8, 4, 4, 0),
    6: (64, 16, 8, 8, 16, 8, 8, 4, 8, 8, 4, 4, 8, 4, 4, 0),
    5: (32, 16, 8, 4, 16, 8, 4, 4, 8, 4, 4, 0, 4, 4, 0, 0),
    4: (32, 16, 8, 4, 16, 8, 4, 0, 8, 4, 0, 0, 4, 0, 0, 0),
    3: (32, 8, 4, 0, 8, 4, 0, 0, 4, 0, 0, 0, 0, 0, 0, 0),
    2: (32, 8, 0, 0, 8, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
    1: (16, 8, 0, 0, 8, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0),
}

# the same counts per zig-zag band, band 0 first
QUANT_MATRICES = {
    matrix: tuple(grid[raster] for raster in ZIGZAG_RASTER) for matrix, grid in QUANT_GRIDS.items()
}

# transmitted AC ranges are unsigned 16-bit integers
MAX_RANGE = 0xFFFF


@dataclass(frozen=True)
class QuantMatrix:
    id: int
    levels: tuple

    @classmethod
    def get(cls, matrix_id):
        if matrix_id not in QUANT_MATRICES:
            raise BadLevels(f"unknown quantization matrix Q{matrix_id}")
        return cls(matrix_id, QUANT_MATRICES[matrix_id])

    def coded_bands(self):
        return [band for band, levels in enumerate(self.levels) if levels]

    def skipped_bands(self):
        return frozenset(band for band, levels in enumerate(self.levels) if not levels)

    def plane_count(self):
        return sum(plane_count(levels) for levels in self.levels if levels)


@dataclass(eq=False)
class QuantizedBand:
    band: int
    bins: np.ndarray
    levels: int
    step: float
    # AC only: the transmitted per-band range R
    dynamic_range: int | None = None

    @property
    def is_dc(self):
        return self.band == 0

    @property
    def plane_count(self):
        return plane_count(self.levels)


@dataclass(eq=False)
class QuantizedBands:
    bands: dict = field(default_factory=dict)
    skipped: frozenset = frozenset()

    def __getitem__(self, band):
        return self.bands[band]

    def __contains__(self, band):
        return band in self.bands


@dataclass(eq=False)
class BandPlanes:
    band: int
    planes: np.ndarray  # (L, n) uint8, most significant first
    levels: int
    step: float
    dynamic_range: int | None = None

    @property
    def is_dc(self):
        return self.band == 0


@dataclass(eq=False)
class BitPlaneSet:
    bands: dict = field(default_factory=dict)
    skipped: frozenset = frozenset()

    def __getitem__(self, band):
        return self.bands[band]


def plane_count(levels):
    """log2 of a power-of-two level count."""
    return int(levels).bit_length() - 1


def _check_levels(levels):
    if levels < 4 or levels & (levels - 1):
        raise BadLevels(f"level count must be a power of two >= 4, got {levels}")


def dc_step(levels):
    return DC_RANGE / levels


def ac_step(dynamic_range, levels):
    return 2.0 * dynamic_range / levels


def band_range(coeffs):
    """Transmitted AC range: max |coefficient| rounded up, at least 1."""
    peak = float(np.max(np.abs(coeffs))) if np.size(coeffs) else 0.0
    return int(min(MAX_RANGE, max(1, math.ceil(peak))))


def quantize_dc(coeffs, levels):
    """Uniform DC quantizer over [0, 1024).

    Returns:
        (bins, step): integer bins in [0, levels - 1] and the step W

    """
    _check_levels(levels)
    step = dc_step(levels)
    bins = np.floor(np.asarray(coeffs, dtype=np.float64) / step)
    return np.clip(bins, 0, levels - 1).astype(np.int32), step


def quantize_ac(coeffs, levels, dynamic_range=None):
    """Dead-zone AC quantizer.

    Args:
        coeffs (ndarray): one AC band
        levels (int): level count from the quantization matrix
        dynamic_range (int): R to use; measured from the band when omitted

    Returns:
        (bins, step, R): signed bins with |bin| <= levels/2 - 1, the step
        W = 2R/levels and the range R

    """
    _check_levels(levels)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if dynamic_range is None:
        dynamic_range = band_range(coeffs)
    step = ac_step(dynamic_range, levels)
    magnitude = np.minimum(np.floor(np.abs(coeffs) / step), levels // 2 - 1)
    bins = (np.sign(coeffs) * magnitude).astype(np.int32)
    return bins, step, dynamic_range


def quantize_bands(coeff_bands, matrix):
    """Quantize every coded band of a frame with the given matrix."""
    quantized = {}
    for band in matrix.coded_bands():
        levels = matrix.levels[band]
        if band == 0:
            bins, step = quantize_dc(coeff_bands[band], levels)
            quantized[band] = QuantizedBand(band, bins, levels, step)
        else:
            bins, step, dynamic_range = quantize_ac(coeff_bands[band], levels)
            quantized[band] = QuantizedBand(band, bins, levels, step, dynamic_range)
    return QuantizedBands(quantized, matrix.skipped_bands())


def band_to_planes(bins, levels, signed):
    """Split one band's bins into bit planes, most significant first."""
    bins = np.asarray(bins, dtype=np.int64)
    count = plane_count(levels)
    if signed:
        limit = levels // 2 - 1
        if np.any(np.abs(bins) > limit):
            raise BinOutOfRange(f"AC bins must lie in [-{limit}, {limit}]")
        magnitude = np.abs(bins)
        planes = [(bins < 0).astype(np.uint8)]
        shifts = range(count - 2, -1, -1)
    else:
        if np.any(bins < 0) or np.any(bins > levels - 1):
            raise BinOutOfRange(f"DC bins must lie in [0, {levels - 1}]")
        magnitude = bins
        planes = []
        shifts = range(count - 1, -1, -1)
    planes.extend(((magnitude >> shift) & 1).astype(np.uint8) for shift in shifts)
    return np.array(planes, dtype=np.uint8).reshape(count, bins.size)


def planes_to_band(planes, levels, signed):
    """Reassemble bins from bit planes, most significant first."""
    planes = np.asarray(planes, dtype=np.int64)
    count = plane_count(levels)
    if levels < 4 or levels & (levels - 1):
        raise InconsistentPlaneCount(f"no plane layout for {levels} levels")
    if planes.ndim != 2 or planes.shape[0] != count:
        raise InconsistentPlaneCount(
            f"{levels} levels need {count} planes, got {planes.shape[0] if planes.ndim else 0}"
        )
    magnitude_planes = planes[1:] if signed else planes
    magnitude = np.zeros(planes.shape[1], dtype=np.int64)
    for plane in magnitude_planes:
        magnitude = (magnitude << 1) | plane
    if signed:
        magnitude = np.where(planes[0] == 1, -magnitude, magnitude)
    return magnitude.astype(np.int32)


def bins_to_bitplanes(quantized):
    """Bit planes for every coded band of a quantized frame."""
    result = {}
    for band, q in quantized.bands.items():
        planes = band_to_planes(q.bins, q.levels, signed=not q.is_dc)
        result[band] = BandPlanes(band, planes, q.levels, q.step, q.dynamic_range)
    return BitPlaneSet(result, quantized.skipped)


def bitplanes_to_bins(plane_set):
    """Inverse of bins_to_bitplanes."""
    result = {}
    for band, p in plane_set.bands.items():
        bins = planes_to_band(p.planes, p.levels, signed=not p.is_dc)
        result[band] = QuantizedBand(band, bins, p.levels, p.step, p.dynamic_range)
    return QuantizedBands(result, plane_set.skipped)


def bin_interval(bins, step, signed):
    """Closed interval each bin denotes, as (low, high) arrays.

    DC bins cover [qW, (q+1)W]; AC bins follow the dead-zone geometry:
    positive [qW, (q+1)W], negative [(q-1)W, qW], zero [-W, W].
    """
    q = np.asarray(bins, dtype=np.float64)
    if not signed:
        return q * step, (q + 1) * step
    low = np.where(q > 0, q * step, np.where(q < 0, (q - 1) * step, -step))
    high = np.where(q > 0, (q + 1) * step, np.where(q < 0, q * step, step))
    return low, high
