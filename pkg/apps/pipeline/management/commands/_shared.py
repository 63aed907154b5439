"""Arguments and helpers shared by the wz management commands."""

import csv
import math
from fractions import Fraction
from pathlib import Path

from django.core.management.base import CommandError

from apps.common.errors import CodecError
from apps.frames.frames import LAYOUT_Y, LAYOUTS, read_raw

# exit codes
MALFORMED_INPUT = 2
MALFORMED_BITSTREAM = 3
FLAGGED_PLANES = 4


def parse_fps(value):
    try:
        fps = Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise CommandError(f"bad frame rate {value!r}", returncode=MALFORMED_INPUT) from None
    if fps <= 0 or fps.numerator > 0xFFFF or fps.denominator > 0xFFFF:
        raise CommandError(f"frame rate {value} out of range", returncode=MALFORMED_INPUT)
    return fps


def parse_sweep(value):
    """"1..8", "2,5,8" or "4" -> sorted quantization matrix ids."""
    try:
        if ".." in value:
            lo, hi = (int(part) for part in value.split(".."))
            points = range(lo, hi + 1)
        else:
            points = [int(part) for part in value.split(",")]
    except ValueError:
        raise CommandError(f"bad sweep {value!r}", returncode=MALFORMED_INPUT) from None
    points = sorted(set(points))
    if not points or points[0] < 1 or points[-1] > 8:
        raise CommandError(f"sweep {value!r} must stay within 1..8", returncode=MALFORMED_INPUT)
    return points


def add_sequence_arguments(parser, flag="--input"):
    parser.add_argument(flag, dest="input", required=True, help="raw planar video file")
    parser.add_argument("--width", type=int, required=True)
    parser.add_argument("--height", type=int, required=True)
    parser.add_argument("--layout", choices=LAYOUTS, default=LAYOUT_Y)
    parser.add_argument("--fps", default="15", help="frame rate, e.g. 15 or 30000/1001")


def add_thread_argument(parser):
    parser.add_argument("--threads", type=int, default=None, help="worker threads, 0 = auto")


def read_sequence(path, width, height, layout=LAYOUT_Y, fps="15"):
    """Read a raw file, turning every input problem into exit code 2."""
    try:
        with open(path, "rb") as handle:
            seq = read_raw(handle, width, height, layout, parse_fps(fps))
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc}", returncode=MALFORMED_INPUT) from exc
    except CodecError as exc:
        raise CommandError(f"{path}: {exc}", returncode=MALFORMED_INPUT) from exc
    if not len(seq):
        raise CommandError(f"{path} holds no frames", returncode=MALFORMED_INPUT)
    return seq


def load_sequence(options):
    return read_sequence(
        options["input"], options["width"], options["height"], options["layout"], options["fps"]
    )


def write_csv(path, header, rows):
    with open(Path(path), "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        writer.writerows(rows)


def format_psnr(value):
    return "inf" if math.isinf(value) else f"{value:.4f}"


def format_rate(value):
    return f"{value:.4f}"
