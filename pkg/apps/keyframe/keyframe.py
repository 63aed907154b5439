"""Key-frame (intra) coding.

Key frames go through a pluggable codec looked up by id. The built-in codec
is a plain transform coder: 4x4 DCT, uniform quantization with an H.264
style qp scale, then zig-zag run/level pairs in Exp-Golomb codes.
"""

import logging

import numpy as np

from apps.common.errors import CorruptPayload, UnknownCodec
from apps.frames.frames import Frame
from apps.keyframe.bits import BitReader, BitWriter
from apps.transform.transform import BAND_COUNT, CoeffBands, bands_to_frame, plane_to_bands

logger = logging.getLogger(__name__)

BUILTIN_DCT = 0
EXTERNAL = 1

MAX_QP = 51

# run symbol closing a block
END_OF_BLOCK = BAND_COUNT


def step_for_qp(qp):
    """Quantizer step; doubles every 6 qp, 1 at qp 18."""
    return 2.0 ** ((qp - 18) / 6.0)


def _check_qp(qp):
    if not 0 <= qp <= MAX_QP:
        raise ValueError(f"qp must be in [0, {MAX_QP}], got {qp}")


class BuiltinDctCodec:
    """Transform intra codec; payload is qp (u8) then the block symbols."""

    name = "builtin-dct"

    def encode(self, frame, qp):
        _check_qp(qp)
        levels = np.rint(plane_to_bands(frame.luma).bands / step_for_qp(qp)).astype(np.int64)
        writer = BitWriter()
        writer.write(qp, 8)
        for block in levels.T.tolist():
            run = 0
            for level in block:
                if level:
                    writer.write_ue(run)
                    writer.write_se(level)
                    run = 0
                else:
                    run += 1
            writer.write_ue(END_OF_BLOCK)
        return writer.getvalue()

    def decode(self, payload, width, height):
        reader = BitReader(payload)
        qp = reader.read(8)
        if qp > MAX_QP:
            raise CorruptPayload(f"qp {qp} out of range")
        blocks_w, blocks_h = width // 4, height // 4
        levels = np.zeros((blocks_w * blocks_h, BAND_COUNT), dtype=np.int64)
        for block in range(levels.shape[0]):
            position = 0
            while True:
                run = reader.read_ue()
                if run == END_OF_BLOCK:
                    break
                position += run
                if position >= BAND_COUNT:
                    raise CorruptPayload(f"run overflows block {block}")
                level = reader.read_se()
                if not level:
                    raise CorruptPayload(f"zero level coded in block {block}")
                levels[block, position] = level
                position += 1
        coeffs = CoeffBands(levels.T * step_for_qp(qp), blocks_w, blocks_h)
        plane = bands_to_frame(coeffs)
        return Frame(np.clip(np.floor(plane + 0.5), 0, 255).astype(np.uint8))


CODECS = {BUILTIN_DCT: BuiltinDctCodec()}


def register_codec(codec_id, codec):
    """Install an intra codec under an id; it needs encode() and decode()."""
    if not 0 <= codec_id <= 0xFF:
        raise ValueError(f"codec id must fit in a byte, got {codec_id}")
    CODECS[codec_id] = codec
    name = getattr(codec, "name", type(codec).__name__)
    logger.info(f"Registered intra codec {codec_id}: {name}")


def unregister_codec(codec_id):
    if codec_id == BUILTIN_DCT:
        raise ValueError("the built-in codec cannot be removed")
    CODECS.pop(codec_id, None)


def get_codec(codec_id):
    try:
        return CODECS[codec_id]
    except KeyError:
        raise UnknownCodec(f"no intra codec registered under id {codec_id}") from None


def intra_encode(frame, qp, codec_id=BUILTIN_DCT):
    return get_codec(codec_id).encode(frame, qp)


def intra_decode(payload, width, height, codec_id=BUILTIN_DCT, index=0):
    frame = get_codec(codec_id).decode(payload, width, height)
    return frame.with_index(index)
