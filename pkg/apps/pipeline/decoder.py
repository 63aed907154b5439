"""Wyner-Ziv decoder.

Key frames are intra decoded first. WZ frames follow each GOP's
hierarchical interpolation order: side information from the two nearest
decoded references, a Laplacian fit to their prediction residual, then
every coded band is recovered plane by plane, most significant first, by
pulling syndrome chunks from the feedback channel until the LDPCA decoder
converges and the CRC agrees.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from apps.common.errors import MalformedBitstream
from apps.frames.frames import Sequence
from apps.keyframe.keyframe import intra_decode
from apps.ldpca.ldpca import PlaneDecoder, build_code
from apps.noise_model.noise_model import fit
from apps.pipeline.bitstream import Bitstream
from apps.pipeline.config import CodecConfig
from apps.pipeline.feedback import ArchiveFeedbackChannel
from apps.quantizer.quantizer import (
    QuantizedBand,
    QuantizedBands,
    ac_step,
    dc_step,
    planes_to_band,
    plane_count,
    quantize_ac,
)
from apps.reconstruction.reconstruction import reconstruct_frame
from apps.sideinfo.sideinfo import InterpolationContext, estimate, plan_interpolation
from apps.softinput.softinput import PlaneContext, plane_llrs
from apps.transform.transform import frame_to_bands

logger = logging.getLogger(__name__)

KEY = "key"
WZ = "wz"


@dataclass(frozen=True)
class PlaneStat:
    frame: int
    band: int
    plane: int  # position within the band, 0 = most significant
    chunks_consumed: int
    crc_ok: bool
    bits: int  # accumulated syndrome bits consumed
    requests: int
    iterations: int


@dataclass(eq=False)
class DecoderStats:
    header: object
    frame_types: dict = field(default_factory=dict)
    key_bits: dict = field(default_factory=dict)
    planes: list = field(default_factory=list)
    # (frame, band, plane position) -> decoded bits
    decoded: dict = field(default_factory=dict)
    # WZ frame index -> side-information Frame
    side_info: dict = field(default_factory=dict)
    stored_bits: int = 0

    @property
    def fps(self):
        return self.header.fps

    @property
    def flagged(self):
        return [stat for stat in self.planes if not stat.crc_ok]

    def frame_planes(self, index):
        return [stat for stat in self.planes if stat.frame == index]

    def plane(self, frame, band, plane):
        for stat in self.planes:
            if (stat.frame, stat.band, stat.plane) == (frame, band, plane):
                return stat
        raise KeyError((frame, band, plane))


class WzFrameDecoder:
    """Decodes the WZ frames of one bitstream against a feedback channel."""

    def __init__(self, bitstream, cfg, channel):
        self.header = bitstream.header
        self.cfg = cfg
        self.channel = channel
        self.code = build_code(
            self.header.plane_length, self.header.ldpca_degree, self.header.ldpca_seed
        )

    def decode_plane(self, index, band, position, llr, crc):
        """Pull chunks until the plane decodes and checks; returns (bits, stat)."""
        plane = PlaneDecoder(self.code, llr, crc, self.cfg.max_iterations, self.cfg.entropy_floor)
        chunks = []

        def pull():
            chunk = self.channel.request(index, band, position)
            if chunk is None:
                return False
            chunks.append(chunk)
            return True

        while len(chunks) < self.cfg.initial_chunks and pull():
            pass
        while not (chunks and plane.update(np.concatenate(chunks))):
            if not pull():
                break

        if plane.verified:
            bits = plane.result.bits
        else:
            # exhausted: keep the best guess and flag the plane
            bits = plane.hard_decision()
            logger.warning(
                f"Frame {index} band {band} plane {position} failed after "
                f"{len(chunks)} chunk(s); using hard decisions"
            )

        stat = PlaneStat(
            index,
            band,
            position,
            len(chunks),
            plane.verified,
            int(sum(len(chunk) for chunk in chunks)),
            self.channel.request_count(index, band, position),
            plane.iterations,
        )
        logger.debug(
            f"Frame {index} band {band} plane {position}: {stat.chunks_consumed} chunk(s), "
            f"crc {'ok' if stat.crc_ok else 'FAILED'}"
        )
        return bits, stat

    def decode_band(self, index, record, si_bands, alphas):
        band = record.band
        levels = self.header.levels[band]
        count = plane_count(levels)
        y = si_bands[band]
        if band:
            step = ac_step(record.dynamic_range, levels)
            y_q = quantize_ac(y, levels, record.dynamic_range)[0]
        else:
            step, y_q = dc_step(levels), None

        decoded = {}
        planes, stats = [], []
        for position, plane in enumerate(record.planes):
            significance = count - 1 - position
            ctx = PlaneContext(
                band, significance, levels, step, y, alphas[band], dict(decoded), y_q
            )
            bits, stat = self.decode_plane(index, band, position, plane_llrs(ctx), plane.crc)
            decoded[significance] = bits
            planes.append(bits)
            stats.append(stat)

        bins = planes_to_band(np.array(planes), levels, signed=band != 0)
        quantized = QuantizedBand(band, bins, levels, step, record.dynamic_range)
        return quantized, planes, stats

    def decode(self, record, x_b, x_f, tau, pool):
        """Reconstruct one WZ frame; returns (frame, side info, plane stats, planes)."""
        ctx = InterpolationContext(x_b, x_f, tau)
        si = estimate(ctx, self.cfg.search, record.index)
        alphas = fit(si.residual, si.frame.shape).alphas(self.cfg.soft_input)
        si_bands = frame_to_bands(si.frame)

        results = list(
            pool.map(
                lambda band: self.decode_band(record.index, band, si_bands, alphas),
                record.bands,
            )
        )
        quantized = QuantizedBands(
            {q.band: q for q, _, _ in results},
            frozenset(b for b, levels in enumerate(self.header.levels) if not levels),
        )
        frame = reconstruct_frame(quantized, si_bands, record.index)
        stats = [stat for _, _, band_stats in results for stat in band_stats]
        planes = {
            (record.index, q.band, position): bits
            for q, band_planes, _ in results
            for position, bits in enumerate(band_planes)
        }
        return frame, si, stats, planes


def decode(bitstream, cfg=None, channel=None):
    """Decode an archive bitstream.

    Args:
        bitstream (Bitstream | bytes): parsed stream or its serialized bytes
        cfg (CodecConfig): decoder-side parameters (iterations, soft input,
            motion search, initial chunks, threads)
        channel (FeedbackChannel): chunk source; the archive itself when omitted

    Returns:
        (seq, stats): the decoded Sequence and DecoderStats

    """
    if isinstance(bitstream, (bytes, bytearray, memoryview)):
        bitstream = Bitstream.parse(bitstream)
    cfg = cfg or CodecConfig()
    channel = channel or ArchiveFeedbackChannel(bitstream)
    header = bitstream.header
    if sum(gop.size for gop in bitstream.gops) != header.frame_count:
        raise MalformedBitstream(
            f"GOPs cover {sum(gop.size for gop in bitstream.gops)} of {header.frame_count} frames"
        )

    stats = DecoderStats(header)
    frames = [None] * header.frame_count
    for gop in bitstream.gops:
        frames[gop.start] = intra_decode(
            gop.key_payload, header.width, header.height, header.key_codec, gop.start
        )
        stats.frame_types[gop.start] = KEY
        stats.key_bits[gop.start] = 8 * len(gop.key_payload)

    decoder = WzFrameDecoder(bitstream, cfg, channel)
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        for gop in bitstream.gops:
            records = {record.index: record for record in gop.wz_frames}
            end = gop.start + gop.size
            # a final GOP with no key frame after it leans on its own key twice
            closing = frames[end] if end < header.frame_count else frames[gop.start]
            local = {0: frames[gop.start], gop.size: closing}
            for step in plan_interpolation(gop.size):
                record = records[gop.start + step.target]
                frame, si, plane_stats, planes = decoder.decode(
                    record, local[step.backward], local[step.forward], step.tau, pool
                )
                local[step.target] = frame
                frames[record.index] = frame
                stats.frame_types[record.index] = WZ
                stats.planes.extend(plane_stats)
                stats.decoded.update(planes)
                stats.side_info[record.index] = si.frame
                logger.info(
                    f"Decoded WZ frame {record.index}: "
                    f"{sum(s.bits for s in plane_stats)} syndrome bits, "
                    f"{sum(not s.crc_ok for s in plane_stats)} flagged plane(s)"
                )

    stats.planes.sort(key=lambda s: (s.frame, s.band, s.plane))
    stats.stored_bits = bitstream.stored_bits()
    if stats.flagged:
        logger.warning(f"{len(stats.flagged)} plane(s) decoded without CRC confirmation")
    return Sequence(frames, header.fps), stats
