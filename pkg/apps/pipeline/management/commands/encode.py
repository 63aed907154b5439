"""
Encode a raw luma sequence into a WZ archive bitstream.

    wz encode --input clip.yuv --width 176 --height 144 --q 8 --gop 2 --out clip.wzc
"""

from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from apps.pipeline.config import CodecConfig
from apps.pipeline.encoder import encode
from apps.pipeline.management.commands._shared import (
    MALFORMED_INPUT,
    add_sequence_arguments,
    add_thread_argument,
    load_sequence,
)


class Command(BaseCommand):
    help = "Encode a raw video file into a Wyner-Ziv archive bitstream"

    def add_arguments(self, parser):
        add_sequence_arguments(parser)
        parser.add_argument("--q", type=int, choices=range(1, 9), default=None)
        parser.add_argument("--gop", default=None, help='"adaptive" or a fixed length')
        parser.add_argument("--out", required=True)
        add_thread_argument(parser)

    def handle(self, *args, **options):
        seq = load_sequence(options)
        try:
            cfg = CodecConfig.from_settings(
                quant_matrix=options["q"], gop=options["gop"], threads=options["threads"]
            )
        except ValueError as exc:
            raise CommandError(str(exc), returncode=MALFORMED_INPUT) from exc

        self.stderr.write(
            f"Encoding {len(seq)} frame(s) {seq.width}x{seq.height} at Q{cfg.quant_matrix}"
        )
        bitstream, stats = encode(seq, cfg)
        data = bitstream.serialize()
        Path(options["out"]).write_bytes(data)

        self.stderr.write(f"GOPs: {' '.join(str(size) for size in stats.plan.sizes)}")
        self.stderr.write(
            self.style.SUCCESS(f"Wrote {len(data)} bytes to {options['out']}")
        )
