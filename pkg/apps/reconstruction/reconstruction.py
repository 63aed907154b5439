"""Bin-constrained reconstruction of decoded WZ coefficients.

A decoded bin only says which interval the coefficient lies in. The side
information is trusted wherever it falls inside that interval and clamped
to the nearest edge otherwise.
"""

import numpy as np

from apps.common.errors import InconsistentBands
from apps.frames.frames import Frame
from apps.quantizer.quantizer import bin_interval
from apps.transform.transform import CoeffBands, bands_to_frame


def reconstruct_coeff(q, y, step, signed=True):
    """Clamp SI coefficients y into the interval of decoded bins q.

    Signed (AC) bins follow the dead-zone geometry: [qW, (q+1)W] for q > 0,
    [(q-1)W, qW] for q < 0 and [-W, W] for q = 0. Unsigned (DC) bins use
    [qW, (q+1)W].
    """
    low, high = bin_interval(q, step, signed)
    result = np.clip(np.asarray(y, dtype=np.float64), low, high)
    return result if result.ndim else float(result)


def reconstruct_bands(quantized, si_bands):
    """Reconstructed coefficient bands; uncoded bands keep the SI values."""
    data = np.array(si_bands.bands, dtype=np.float64)
    for band, q in quantized.bands.items():
        if np.size(q.bins) != si_bands.band_length:
            raise InconsistentBands(
                f"band {band} has {np.size(q.bins)} bins for {si_bands.band_length} coefficients"
            )
        data[band] = reconstruct_coeff(q.bins, data[band], q.step, signed=not q.is_dc)
    return CoeffBands(data, si_bands.blocks_w, si_bands.blocks_h)


def reconstruct_frame(quantized, si_bands, index=0):
    """Decoded WZ frame from its bins and the side information's bands."""
    plane = bands_to_frame(reconstruct_bands(quantized, si_bands))
    return Frame(np.clip(np.floor(plane + 0.5), 0, 255).astype(np.uint8), index)
