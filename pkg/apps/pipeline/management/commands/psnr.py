"""
Mean luma PSNR between two raw files of the same size.

    wz psnr --a ref.yuv --b rec.yuv --width 176 --height 144

Prints "inf" when the files are identical.
"""

import math

from django.core.management.base import BaseCommand, CommandError

from apps.frames.frames import LAYOUT_Y, LAYOUTS, mean_psnr, psnr
from apps.pipeline.management.commands._shared import MALFORMED_INPUT, format_psnr, read_sequence


class Command(BaseCommand):
    help = "Print the mean luma PSNR of two raw video files"

    def add_arguments(self, parser):
        parser.add_argument("--a", required=True)
        parser.add_argument("--b", required=True)
        parser.add_argument("--width", type=int, required=True)
        parser.add_argument("--height", type=int, required=True)
        parser.add_argument("--layout", choices=LAYOUTS, default=LAYOUT_Y)

    def handle(self, *args, **options):
        a = read_sequence(options["a"], options["width"], options["height"], options["layout"])
        b = read_sequence(options["b"], options["width"], options["height"], options["layout"])
        if len(a) != len(b):
            raise CommandError(
                f"{options['a']} has {len(a)} frames, {options['b']} has {len(b)}",
                returncode=MALFORMED_INPUT,
            )

        scores = [psnr(x, y) for x, y in zip(a, b)]
        value = math.inf if all(math.isinf(s) for s in scores) else mean_psnr(a, b)
        self.stdout.write(format_psnr(value))
