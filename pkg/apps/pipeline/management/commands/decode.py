"""
Decode a WZ archive bitstream back to raw video.

    wz decode --in clip.wzc --out rec.yuv --stats stats.csv

Exits with 4 when the output was written but some planes could not be
confirmed by their CRC.
"""

from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from apps.common.errors import CodecError
from apps.frames.frames import LAYOUT_Y, LAYOUTS, write_raw
from apps.pipeline.bitstream import Bitstream
from apps.pipeline.config import CodecConfig
from apps.pipeline.decoder import KEY, decode
from apps.pipeline.management.commands._shared import (
    FLAGGED_PLANES,
    MALFORMED_BITSTREAM,
    MALFORMED_INPUT,
    add_thread_argument,
    format_rate,
    write_csv,
)
from apps.pipeline.reports import rate_report

STATS_HEADER = ("frame", "type", "band", "plane", "chunks_consumed", "crc_ok", "bits")


def stats_rows(stats):
    """stats.csv rows; key frames carry their payload size in bits."""
    rows = []
    for index in sorted(stats.frame_types):
        if stats.frame_types[index] == KEY:
            rows.append((index, KEY, "", "", "", "", stats.key_bits[index]))
            continue
        for plane in stats.frame_planes(index):
            rows.append(
                (
                    index,
                    stats.frame_types[index],
                    plane.band,
                    plane.plane,
                    plane.chunks_consumed,
                    int(plane.crc_ok),
                    plane.bits,
                )
            )
    return rows


class Command(BaseCommand):
    help = "Decode a Wyner-Ziv archive bitstream into raw video"

    def add_arguments(self, parser):
        parser.add_argument("--in", dest="source", required=True)
        parser.add_argument("--out", required=True)
        parser.add_argument("--stats", default=None)
        parser.add_argument("--layout", choices=LAYOUTS, default=LAYOUT_Y)
        add_thread_argument(parser)

    def handle(self, *args, **options):
        try:
            data = Path(options["source"]).read_bytes()
        except OSError as exc:
            raise CommandError(
                f"cannot read {options['source']}: {exc}", returncode=MALFORMED_INPUT
            ) from exc

        try:
            bitstream = Bitstream.parse(data)
            seq, stats = decode(bitstream, CodecConfig.from_settings(threads=options["threads"]))
        except CodecError as exc:
            raise CommandError(str(exc), returncode=MALFORMED_BITSTREAM) from exc

        Path(options["out"]).write_bytes(write_raw(seq, options["layout"]))
        if options["stats"]:
            write_csv(options["stats"], STATS_HEADER, stats_rows(stats))

        report = rate_report(stats)
        for name, bits, kbps in report.rows():
            self.stderr.write(f"  {name:<8} {bits:>10} bits  {format_rate(kbps)} kbps")
        self.stderr.write(f"  unused archive bits: {report.unused_bits}")

        if stats.flagged:
            raise CommandError(
                f"{len(stats.flagged)} plane(s) failed CRC verification",
                returncode=FLAGGED_PLANES,
            )
        self.stderr.write(
            self.style.SUCCESS(
                f"Decoded {len(seq)} frame(s) at {format_rate(report.kbps())} kbps"
            )
        )
