"""Rate accounting over a completed decode.

Only syndrome chunks the decoder actually pulled count toward the rate;
archive bits that were stored but never requested are reported apart.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from apps.pipeline.bitstream import gop_overhead_bits, header_bits, plane_overhead_bits
from apps.pipeline.decoder import KEY

KEY_FRAMES = "key"
WZ_SYNDROME = "wz"
CRC = "crc"
RANGES = "ranges"
HEADERS = "headers"
COMPONENTS = (KEY_FRAMES, WZ_SYNDROME, CRC, RANGES, HEADERS)

CRC_BITS = 8
RANGE_BITS = 16


@dataclass(frozen=True)
class RateReport:
    fps: Fraction
    frame_count: int
    bits: dict = field(default_factory=dict)
    frame_bits: dict = field(default_factory=dict)
    unused_bits: int = 0

    @property
    def total_bits(self):
        return sum(self.bits.values())

    def to_kbps(self, bits):
        if not self.frame_count:
            return 0.0
        return float(bits * self.fps / self.frame_count / 1000)

    def kbps(self, component=None):
        """kbps of one component, or of the whole stream."""
        if component is None:
            return self.to_kbps(self.total_bits)
        return self.to_kbps(self.bits[component])

    @property
    def wz_kbps(self):
        """Everything a WZ frame costs: consumed chunks, CRCs and ranges."""
        return self.to_kbps(self.bits[WZ_SYNDROME] + self.bits[CRC] + self.bits[RANGES])

    def frame_kbps(self, index):
        """Rate of one frame sent alone at the sequence frame rate."""
        return float(self.frame_bits[index] * self.fps / 1000)

    def rows(self):
        return [(name, self.bits[name], self.kbps(name)) for name in COMPONENTS]


def rate_report(stats, fps=None):
    """Per-component rate table for a DecoderStats."""
    header = stats.header
    fps = Fraction(fps if fps is not None else stats.fps)
    gop_count = len(stats.key_bits)
    wz_frames = [index for index, kind in stats.frame_types.items() if kind != KEY]
    ac_bands = sum(1 for band in header.coded_bands() if band)

    frame_bits = dict(stats.key_bits)
    for index in wz_frames:
        planes = stats.frame_planes(index)
        frame_bits[index] = (
            sum(p.bits for p in planes) + CRC_BITS * len(planes) + RANGE_BITS * ac_bands
        )

    consumed = sum(p.bits for p in stats.planes)
    bits = {
        KEY_FRAMES: sum(stats.key_bits.values()),
        WZ_SYNDROME: consumed,
        CRC: CRC_BITS * len(stats.planes),
        RANGES: RANGE_BITS * ac_bands * len(wz_frames),
        HEADERS: header_bits()
        + gop_overhead_bits() * gop_count
        + plane_overhead_bits() * len(stats.planes),
    }
    return RateReport(
        fps,
        header.frame_count,
        bits,
        dict(sorted(frame_bits.items())),
        max(0, stats.stored_bits - consumed),
    )
