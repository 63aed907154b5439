"""Wyner-Ziv encoder.

Key frames are intra coded. Every other frame is transformed, quantized and
split into bit planes, and each plane is reduced to its full accumulated
syndrome plus a CRC-8; the archive stores all of it and the decoder's
feedback loop decides how much is actually used.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from apps.common.errors import EmptySequence
from apps.keyframe.keyframe import intra_encode
from apps.ldpca.ldpca import build_code, encode_plane
from apps.pipeline.bitstream import (
    BandRecord,
    Bitstream,
    GopRecord,
    PlaneRecord,
    StreamHeader,
    WzFrameRecord,
)
from apps.pipeline.config import CodecConfig
from apps.quantizer.quantizer import QuantMatrix, bins_to_bitplanes, quantize_bands
from apps.splitter.splitter import plan_gops
from apps.transform.transform import frame_to_bands

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class EncoderStats:
    plan: object
    key_bytes: dict = field(default_factory=dict)
    # (frame, band, plane position) -> source bits, when retained
    planes: dict = field(default_factory=dict)
    stored_bits: int = 0

    @property
    def key_frames(self):
        return sorted(self.key_bytes)


def encode_wz_frame(frame, matrix, code, retain=None):
    """Band and plane records for one WZ frame."""
    plane_set = bins_to_bitplanes(quantize_bands(frame_to_bands(frame), matrix))
    record = WzFrameRecord(frame.index)
    for band in matrix.coded_bands():
        planes = plane_set[band]
        band_record = BandRecord(band, planes.dynamic_range)
        for position, bits in enumerate(planes.planes):
            encoded = encode_plane(bits, code)
            band_record.planes.append(
                PlaneRecord(encoded.crc, code.chunk_count, encoded.acc[code.order])
            )
            if retain is not None:
                retain[(frame.index, band, position)] = bits.copy()
        record.bands.append(band_record)
    return record


def encode(seq, cfg=None, retain_planes=False):
    """Encode a sequence into an archive bitstream.

    Args:
        seq (Sequence): frames to code
        cfg (CodecConfig): codec parameters; defaults throughout when omitted
        retain_planes (bool): keep every source bit plane in the stats

    Returns:
        (bitstream, stats): the Bitstream and an EncoderStats

    """
    if not len(seq):
        raise EmptySequence("cannot encode an empty sequence")
    cfg = cfg or CodecConfig()
    matrix = QuantMatrix.get(cfg.quant_matrix)
    plan = plan_gops(seq, cfg.activity, fixed=cfg.gop)
    code = build_code(seq.width * seq.height // 16, cfg.ldpca_degree, cfg.ldpca_seed)

    header = StreamHeader(
        seq.width,
        seq.height,
        seq.fps,
        len(seq),
        cfg.quant_matrix,
        cfg.ldpca_seed,
        cfg.ldpca_degree,
        cfg.key_codec,
        cfg.key_qp,
    )
    stats = EncoderStats(plan)
    retain = stats.planes if retain_planes else None

    gops = []
    for start, size in zip(plan.starts(), plan.sizes):
        payload = intra_encode(seq[start], cfg.key_qp, cfg.key_codec)
        stats.key_bytes[start] = len(payload)
        gops.append(GopRecord(start, size, payload))

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        for gop in gops:
            frames = [seq[index] for index in range(gop.start + 1, gop.start + gop.size)]
            gop.wz_frames = list(
                pool.map(lambda f: encode_wz_frame(f, matrix, code, retain), frames)
            )

    bitstream = Bitstream(header, gops)
    stats.stored_bits = bitstream.stored_bits()
    logger.info(
        f"Encoded {len(seq)} frame(s) at Q{cfg.quant_matrix}: {len(gops)} key, "
        f"{len(seq) - len(gops)} WZ, {stats.stored_bits} syndrome bits stored"
    )
    return bitstream, stats
