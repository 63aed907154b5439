"""The archive bitstream: header, key-frame payloads and stored syndromes.

Every integer is little-endian. Layout:

    header   "WZC1" version:u8 width:u16 height:u16 fps_num:u16 fps_den:u16
             frames:u32 matrix:u8 seed:u64 d_v:u8 key_codec:u8 key_qp:u8
    per GOP  size:u8 key_length:u32 key_payload
             per WZ frame, per coded band in ascending order:
                 R:u16 (AC bands only)
                 per plane, most significant first:
                     crc:u8 chunks:u16 accumulated bits in ladder order,
                     packed MSB-first and zero-padded to a byte
"""

import math
import struct
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from apps.common.errors import MalformedBitstream
from apps.ldpca.ldpca import build_ladder
from apps.quantizer.quantizer import QUANT_MATRICES, plane_count

MAGIC = b"WZC1"
VERSION = 1

HEADER = struct.Struct("<4sBHHHHIBQBBB")
GOP_HEADER = struct.Struct("<BI")
RANGE = struct.Struct("<H")
PLANE_HEADER = struct.Struct("<BH")


@dataclass(frozen=True)
class StreamHeader:
    width: int
    height: int
    fps: Fraction
    frame_count: int
    quant_matrix: int
    ldpca_seed: int
    ldpca_degree: int
    key_codec: int
    key_qp: int
    version: int = VERSION

    @property
    def plane_length(self):
        """Bits per plane: one per 4x4 block."""
        return self.width * self.height // 16

    @property
    def levels(self):
        return QUANT_MATRICES[self.quant_matrix]

    def coded_bands(self):
        return [band for band, levels in enumerate(self.levels) if levels]


@dataclass(eq=False)
class PlaneRecord:
    crc: int
    chunk_count: int
    # accumulated syndrome bits in ladder order, as many as the chunks hold
    bits: np.ndarray


@dataclass(eq=False)
class BandRecord:
    band: int
    dynamic_range: int | None
    planes: list = field(default_factory=list)


@dataclass(eq=False)
class WzFrameRecord:
    index: int
    bands: list = field(default_factory=list)

    def band(self, band):
        for record in self.bands:
            if record.band == band:
                return record
        raise KeyError(band)


@dataclass(eq=False)
class GopRecord:
    start: int
    size: int
    key_payload: bytes
    wz_frames: list = field(default_factory=list)


@dataclass(eq=False)
class Bitstream:
    header: StreamHeader
    gops: list = field(default_factory=list)

    def wz_frames(self):
        for gop in self.gops:
            yield from gop.wz_frames

    def planes(self):
        for frame in self.wz_frames():
            for band in frame.bands:
                yield from band.planes

    def stored_bits(self):
        """Accumulated syndrome bits held in the archive, padding excluded."""
        return sum(len(plane.bits) for plane in self.planes())

    def serialize(self):
        h = self.header
        out = [
            HEADER.pack(
                MAGIC,
                h.version,
                h.width,
                h.height,
                h.fps.numerator,
                h.fps.denominator,
                h.frame_count,
                h.quant_matrix,
                h.ldpca_seed,
                h.ldpca_degree,
                h.key_codec,
                h.key_qp,
            )
        ]
        for gop in self.gops:
            out.append(GOP_HEADER.pack(gop.size, len(gop.key_payload)))
            out.append(bytes(gop.key_payload))
            for frame in gop.wz_frames:
                for band in frame.bands:
                    if band.band:
                        out.append(RANGE.pack(band.dynamic_range))
                    for plane in band.planes:
                        out.append(PLANE_HEADER.pack(plane.crc, plane.chunk_count))
                        out.append(np.packbits(np.asarray(plane.bits, dtype=np.uint8)).tobytes())
        return b"".join(out)

    @classmethod
    def parse(cls, data):
        """Inverse of serialize(); raises MalformedBitstream on any defect."""
        return _Parser(bytes(data)).parse()


class _Parser:
    def __init__(self, data):
        self.data = data
        self.offset = 0

    def take(self, size, what):
        end = self.offset + size
        if end > len(self.data):
            raise MalformedBitstream(
                f"stream ends inside {what} at byte {self.offset} of {len(self.data)}"
            )
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def unpack(self, layout, what):
        return layout.unpack(self.take(layout.size, what))

    def header(self):
        (
            magic,
            version,
            width,
            height,
            fps_num,
            fps_den,
            frame_count,
            matrix,
            seed,
            d_v,
            key_codec,
            key_qp,
        ) = self.unpack(HEADER, "the header")
        if magic != MAGIC:
            raise MalformedBitstream(f"bad magic {magic!r}")
        if version != VERSION:
            raise MalformedBitstream(f"unsupported version {version}")
        if not width or not height or width % 16 or height % 16:
            raise MalformedBitstream(f"bad frame size {width}x{height}")
        if not fps_num or not fps_den:
            raise MalformedBitstream(f"bad frame rate {fps_num}/{fps_den}")
        if matrix not in QUANT_MATRICES:
            raise MalformedBitstream(f"unknown quantization matrix Q{matrix}")
        if not d_v:
            raise MalformedBitstream("LDPCA degree is zero")
        return StreamHeader(
            width,
            height,
            Fraction(fps_num, fps_den),
            frame_count,
            matrix,
            seed,
            d_v,
            key_codec,
            key_qp,
            version,
        )

    def plane(self, ladder, where):
        crc, chunk_count = self.unpack(PLANE_HEADER, where)
        if chunk_count > len(ladder):
            raise MalformedBitstream(
                f"{where}: {chunk_count} chunks stored, the ladder has {len(ladder)}"
            )
        length = int(sum(len(chunk) for chunk in ladder[:chunk_count]))
        packed = np.frombuffer(self.take(math.ceil(length / 8), where), dtype=np.uint8)
        bits = np.unpackbits(packed)[:length]
        return PlaneRecord(crc, chunk_count, bits)

    def parse(self):
        header = self.header()
        ladder = build_ladder(header.plane_length)
        gops = []
        start = 0
        while start < header.frame_count:
            size, key_length = self.unpack(GOP_HEADER, f"GOP at frame {start}")
            if not size or start + size > header.frame_count:
                raise MalformedBitstream(f"GOP of {size} frames at frame {start} does not fit")
            gop = GopRecord(start, size, self.take(key_length, f"key frame {start}"))
            for index in range(start + 1, start + size):
                frame = WzFrameRecord(index)
                for band in header.coded_bands():
                    where = f"frame {index} band {band}"
                    dynamic_range = self.unpack(RANGE, where)[0] if band else None
                    if band and not dynamic_range:
                        raise MalformedBitstream(f"{where}: zero dynamic range")
                    record = BandRecord(band, dynamic_range)
                    for _ in range(plane_count(header.levels[band])):
                        record.planes.append(self.plane(ladder, where))
                    frame.bands.append(record)
                gop.wz_frames.append(frame)
            gops.append(gop)
            start += size
        if self.offset != len(self.data):
            raise MalformedBitstream(f"{len(self.data) - self.offset} trailing bytes")
        return Bitstream(header, gops)


def header_bits():
    return HEADER.size * 8


def gop_overhead_bits():
    return GOP_HEADER.size * 8


def plane_overhead_bits():
    """Chunk-count field; the CRC byte is accounted separately."""
    return (PLANE_HEADER.size - 1) * 8
