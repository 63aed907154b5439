import io
import math

import numpy as np
import pytest

from apps.common.errors import BadDimensions, DimensionMismatch, TruncatedStream
from apps.frames.frames import (
    Frame,
    Sequence,
    mean_psnr,
    psnr,
    read_raw,
    write_raw,
)

# ------------------------------------
# frame containers
# ------------------------------------


def test_frame_is_read_only(gray_frame):
    with pytest.raises(ValueError):
        gray_frame.luma[0, 0] = 1


def test_frame_rejects_bad_dimensions():
    with pytest.raises(BadDimensions):
        Frame(np.zeros((16, 20), dtype=np.uint8))
    with pytest.raises(BadDimensions):
        Frame(np.zeros(256, dtype=np.uint8))


def test_sequence_reindexes_and_checks_shapes(gray_frame):
    seq = Sequence([gray_frame, gray_frame])
    assert [frame.index for frame in seq] == [0, 1]
    with pytest.raises(DimensionMismatch):
        Sequence([gray_frame, Frame(np.zeros((32, 16), dtype=np.uint8))])


# ------------------------------------
# raw reading and writing
# ------------------------------------


def test_read_luma_only():
    seq = read_raw(bytes(512), 16, 16, "y")
    assert len(seq) == 2
    assert seq.width == 16 and seq.height == 16


def test_read_yuv420_discards_chroma():
    data = bytes(range(256)) + bytes([7]) * 128
    seq = read_raw(io.BytesIO(data), 16, 16, "yuv420")
    assert len(seq) == 1
    assert seq[0].luma.tobytes() == bytes(range(256))


def test_read_truncated():
    with pytest.raises(TruncatedStream):
        read_raw(bytes(300), 16, 16, "y")


def test_read_bad_dimensions():
    with pytest.raises(BadDimensions):
        read_raw(bytes(240), 15, 16, "y")


def test_round_trip_luma_only(random_sequence):
    data = write_raw(random_sequence, "y")
    assert read_raw(data, 48, 32, "y") == random_sequence


def test_round_trip_yuv420(random_sequence):
    data = write_raw(random_sequence, "yuv420")
    assert len(data) == 3 * 48 * 32 * 3 // 2
    assert read_raw(data, 48, 32, "yuv420") == random_sequence


def test_yuv420_chroma_is_mid_gray(gray_frame):
    data = write_raw(Sequence([gray_frame]), "yuv420")
    assert len(data) == 384
    assert data[256:] == bytes([0x80]) * 128


def test_empty_sequence_writes_nothing():
    assert write_raw(Sequence([]), "y") == b""


# ------------------------------------
# fidelity
# ------------------------------------


def test_psnr_identical_is_infinite(gray_frame):
    assert psnr(gray_frame, gray_frame) == math.inf


def test_psnr_off_by_one(gray_frame):
    other = Frame(gray_frame.luma.astype(np.int16) + 1)
    assert psnr(gray_frame, other) == pytest.approx(10 * math.log10(65025))
    assert psnr(gray_frame, other) == pytest.approx(48.13, abs=0.01)


def test_psnr_matches_loop_oracle(random_sequence):
    a, b = random_sequence[0], random_sequence[1]
    total = 0.0
    for y in range(a.height):
        for x in range(a.width):
            d = float(a.luma[y, x]) - float(b.luma[y, x])
            total += d * d
    expected = 10 * math.log10(255**2 / (total / (a.width * a.height)))
    assert abs(psnr(a, b) - expected) < 1e-9
    assert psnr(a, b) == psnr(b, a)


def test_psnr_dimension_mismatch(gray_frame):
    with pytest.raises(DimensionMismatch):
        psnr(gray_frame, Frame(np.zeros((32, 16), dtype=np.uint8)))


def test_mean_psnr_caps_perfect_frames(random_sequence):
    assert mean_psnr(random_sequence, random_sequence) == 99.0
