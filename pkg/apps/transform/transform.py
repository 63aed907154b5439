"""4x4 block DCT and the 16-band zig-zag grouping of its coefficients."""

from dataclasses import dataclass

import numpy as np
from scipy.fft import dctn, idctn

from apps.common.errors import InconsistentBands

BLOCK = 4
BAND_COUNT = BLOCK * BLOCK

# (row, col) of each zig-zag position; position 0 is the DC band
ZIGZAG = (
    (0, 0), (0, 1), (1, 0), (2, 0),
    (1, 1), (0, 2), (0, 3), (1, 2),
    (2, 1), (3, 0), (3, 1), (2, 2),
    (1, 3), (2, 3), (3, 2), (3, 3),
)  # fmt: skip

# raster index (row * 4 + col) of each zig-zag position
ZIGZAG_RASTER = np.array([row * BLOCK + col for row, col in ZIGZAG])

# upper bound (exclusive) of the DC coefficient for 8-bit input, 4 * 255 < 1024
DC_RANGE = 1024.0


@dataclass(frozen=True, eq=False)
class CoeffBands:
    """Coefficients grouped by zig-zag band.

    bands[k] holds the k-th zig-zag coefficient of every 4x4 block, blocks
    in raster order, so the array is (16, blocks_h * blocks_w).
    """

    bands: np.ndarray
    blocks_w: int
    blocks_h: int

    @property
    def width(self):
        return self.blocks_w * BLOCK

    @property
    def height(self):
        return self.blocks_h * BLOCK

    @property
    def band_length(self):
        return self.blocks_w * self.blocks_h

    def __getitem__(self, band):
        return self.bands[band]


def zigzag_order():
    return ZIGZAG


def dct4(block):
    """Orthonormal 2-D DCT-II of one 4x4 block."""
    return dctn(np.asarray(block, dtype=np.float64), type=2, norm="ortho")


def idct4(coeffs):
    """Inverse of dct4."""
    return idctn(np.asarray(coeffs, dtype=np.float64), type=2, norm="ortho")


def _to_blocks(plane):
    height, width = plane.shape
    if height % BLOCK or width % BLOCK:
        raise InconsistentBands(f"plane {width}x{height} is not a whole 4x4 block grid")
    rows, cols = height // BLOCK, width // BLOCK
    blocks = plane.reshape(rows, BLOCK, cols, BLOCK).swapaxes(1, 2)
    return blocks.reshape(rows * cols, BLOCK, BLOCK), rows, cols


def plane_to_bands(plane):
    """Transform any real plane with dimensions divisible by 4 into bands."""
    blocks, rows, cols = _to_blocks(np.asarray(plane, dtype=np.float64))
    coeffs = dctn(blocks, type=2, norm="ortho", axes=(1, 2))
    flat = coeffs.reshape(rows * cols, BAND_COUNT)
    return CoeffBands(np.ascontiguousarray(flat[:, ZIGZAG_RASTER].T), cols, rows)


def frame_to_bands(frame):
    """DCT every 4x4 block of a frame and scatter coefficients into bands."""
    return plane_to_bands(frame.luma)


def bands_to_frame(bands):
    """Inverse zig-zag, IDCT and raster reassembly.

    Returns:
        plane (ndarray): unclamped float64 samples, height x width

    """
    data = np.asarray(bands.bands, dtype=np.float64)
    if data.shape != (BAND_COUNT, bands.band_length):
        raise InconsistentBands(
            f"expected bands of shape {(BAND_COUNT, bands.band_length)}, got {data.shape}"
        )
    flat = np.empty((bands.band_length, BAND_COUNT))
    flat[:, ZIGZAG_RASTER] = data.T
    blocks = idctn(
        flat.reshape(-1, BLOCK, BLOCK), type=2, norm="ortho", axes=(1, 2)
    )
    rows, cols = bands.blocks_h, bands.blocks_w
    plane = blocks.reshape(rows, cols, BLOCK, BLOCK).swapaxes(1, 2)
    return plane.reshape(rows * BLOCK, cols * BLOCK)
