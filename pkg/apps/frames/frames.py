"""Raw planar video I/O, frame containers and fidelity metrics.

Only the luma plane is coded. YUV 4:2:0 input is accepted and its chroma
skipped; on output chroma is synthesized as mid-gray (0x80) so ordinary
players render a neutral picture.
"""

import io
import logging
import math
from fractions import Fraction

import numpy as np

from apps.common.errors import (
    BadDimensions,
    DimensionMismatch,
    TruncatedStream,
)

logger = logging.getLogger(__name__)

LAYOUT_Y = "y"
LAYOUT_YUV420 = "yuv420"
LAYOUTS = (LAYOUT_Y, LAYOUT_YUV420)

# byte written into every synthesized chroma sample
CHROMA_FILL = 0x80

PSNR_PEAK = 255.0


class Frame:
    """One immutable 8-bit luma plane plus its frame number."""

    __slots__ = ("luma", "index")

    def __init__(self, luma, index=0):
        luma = np.array(luma, dtype=np.uint8, copy=True)
        if luma.ndim != 2:
            raise BadDimensions(f"luma must be a 2-D plane, got shape {luma.shape}")
        height, width = luma.shape
        if width == 0 or height == 0 or width % 16 or height % 16:
            raise BadDimensions(
                f"frame dimensions must be nonzero multiples of 16, got {width}x{height}"
            )
        if index < 0:
            raise ValueError(f"frame index must be >= 0, got {index}")
        luma.setflags(write=False)
        self.luma = luma
        self.index = int(index)

    @property
    def width(self):
        return self.luma.shape[1]

    @property
    def height(self):
        return self.luma.shape[0]

    @property
    def shape(self):
        return self.luma.shape

    def with_index(self, index):
        return Frame(self.luma, index)

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self.index == other.index and np.array_equal(self.luma, other.luma)

    def __hash__(self):
        return hash((self.index, self.luma.shape, self.luma.tobytes()))

    def __repr__(self):
        return f"Frame(index={self.index}, {self.width}x{self.height})"


class Sequence:
    """Ordered frames sharing one size; indices run 0, 1, 2, ..."""

    def __init__(self, frames=(), fps=Fraction(15)):
        frames = tuple(frames)
        if frames:
            shape = frames[0].shape
            for position, frame in enumerate(frames):
                if frame.shape != shape:
                    raise DimensionMismatch(
                        f"frame {position} is {frame.width}x{frame.height}, "
                        f"expected {shape[1]}x{shape[0]}"
                    )
                if frame.index != position:
                    frames = tuple(f.with_index(i) for i, f in enumerate(frames))
                    break
        self.frames = frames
        self.fps = Fraction(fps)

    @property
    def width(self):
        return self.frames[0].width if self.frames else 0

    @property
    def height(self):
        return self.frames[0].height if self.frames else 0

    def __len__(self):
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    def __getitem__(self, position):
        return self.frames[position]

    def __eq__(self, other):
        if not isinstance(other, Sequence):
            return NotImplemented
        return self.fps == other.fps and self.frames == other.frames

    def __repr__(self):
        return f"Sequence({len(self)} frames, {self.width}x{self.height}, {self.fps} fps)"


def frame_bytes(width, height, layout):
    """Bytes occupied by one frame of the given layout."""
    if layout == LAYOUT_Y:
        return width * height
    if layout == LAYOUT_YUV420:
        return width * height * 3 // 2
    raise ValueError(f"unknown layout {layout!r}; expected one of {LAYOUTS}")


def read_raw(source, width, height, layout=LAYOUT_Y, fps=Fraction(15)):
    """Read every complete frame from a headerless planar stream.

    Args:
        source (bytes | file): raw bytes or a binary file object
        width (int): luma width in pixels, a multiple of 16
        height (int): luma height in pixels, a multiple of 16
        layout (str): "y" for luma only, "yuv420" to skip 4:2:0 chroma
        fps (Fraction): frame rate carried on the sequence

    Returns:
        seq (Sequence): the decoded frames in stream order

    """
    if width <= 0 or height <= 0 or width % 16 or height % 16:
        raise BadDimensions(
            f"width and height must be positive multiples of 16, got {width}x{height}"
        )

    data = source if isinstance(source, (bytes, bytearray, memoryview)) else source.read()
    data = bytes(data)
    size = frame_bytes(width, height, layout)
    if len(data) % size:
        raise TruncatedStream(
            f"{len(data)} bytes is not a whole number of {size}-byte frames"
        )

    luma_size = width * height
    frames = []
    for index, offset in enumerate(range(0, len(data), size)):
        plane = np.frombuffer(data, dtype=np.uint8, count=luma_size, offset=offset)
        frames.append(Frame(plane.reshape(height, width), index))

    logger.info(f"Read {len(frames)} {width}x{height} frame(s) ({layout})")
    return Sequence(frames, fps)


def write_raw(seq, layout=LAYOUT_Y):
    """Serialize a sequence as headerless planar bytes.

    Args:
        seq (Sequence): frames to write
        layout (str): "y", or "yuv420" to append mid-gray chroma planes

    Returns:
        data (bytes): the raw stream

    """
    frame_bytes(seq.width or 16, seq.height or 16, layout)
    out = io.BytesIO()
    for frame in seq:
        out.write(frame.luma.tobytes())
        if layout == LAYOUT_YUV420:
            out.write(bytes([CHROMA_FILL]) * (frame.width * frame.height // 2))
    return out.getvalue()


def mse(a, b):
    if a.shape != b.shape:
        raise DimensionMismatch(
            f"cannot compare {a.width}x{a.height} with {b.width}x{b.height}"
        )
    diff = a.luma.astype(np.float64) - b.luma.astype(np.float64)
    return float(np.mean(diff * diff))


def psnr(a, b):
    """Luma PSNR in dB; math.inf when the frames are identical."""
    error = mse(a, b)
    if error == 0:
        return math.inf
    return 10.0 * math.log10(PSNR_PEAK**2 / error)


def mean_psnr(reference, decoded):
    """Average per-frame PSNR of two equally long sequences.

    Identical frames are capped at 99 dB so a single perfect frame does not
    turn the mean infinite.
    """
    if len(reference) != len(decoded):
        raise DimensionMismatch(
            f"sequence lengths differ: {len(reference)} vs {len(decoded)}"
        )
    if not len(reference):
        return math.inf
    values = [min(psnr(a, b), 99.0) for a, b in zip(reference, decoded)]
    return float(np.mean(values))
