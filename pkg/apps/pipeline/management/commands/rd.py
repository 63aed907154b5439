"""
Rate-distortion sweep over the quantization matrices.

    wz rd --input clip.yuv --width 176 --height 144 --sweep 1..8 --csv rd.csv

Each point is a full encode, archive round trip and decode. With
--baseline-csv every frame is also coded intra at the point's key qp.
"""

from django.core.management.base import BaseCommand

from apps.frames.frames import Sequence, mean_psnr
from apps.keyframe.keyframe import intra_decode, intra_encode
from apps.pipeline.bitstream import Bitstream
from apps.pipeline.config import CodecConfig
from apps.pipeline.decoder import decode
from apps.pipeline.encoder import encode
from apps.pipeline.management.commands._shared import (
    add_sequence_arguments,
    add_thread_argument,
    format_psnr,
    format_rate,
    load_sequence,
    parse_sweep,
    write_csv,
)
from apps.pipeline.reports import KEY_FRAMES, rate_report

RD_HEADER = ("q", "kbps_total", "kbps_key", "kbps_wz", "psnr_mean")
BASELINE_HEADER = ("q", "kbps", "psnr_mean")


def rd_point(seq, cfg):
    """(kbps_total, kbps_key, kbps_wz, psnr_mean, flagged planes) for one config."""
    bitstream, _ = encode(seq, cfg)
    decoded, stats = decode(Bitstream.parse(bitstream.serialize()), cfg)
    report = rate_report(stats)
    return (
        report.kbps(),
        report.kbps(KEY_FRAMES),
        report.wz_kbps,
        mean_psnr(seq, decoded),
        len(stats.flagged),
    )


def intra_point(seq, cfg):
    """(kbps, psnr_mean) with every frame coded as a key frame."""
    bits, frames = 0, []
    for frame in seq:
        payload = intra_encode(frame, cfg.key_qp, cfg.key_codec)
        bits += 8 * len(payload)
        frames.append(intra_decode(payload, seq.width, seq.height, cfg.key_codec, frame.index))
    kbps = float(bits * seq.fps / len(seq) / 1000)
    return kbps, mean_psnr(seq, Sequence(frames, seq.fps))


class Command(BaseCommand):
    help = "Sweep quantization matrices and write an RD table"

    def add_arguments(self, parser):
        add_sequence_arguments(parser)
        parser.add_argument("--gop", default=None, help='"adaptive" or a fixed length')
        parser.add_argument("--sweep", default="1..8")
        parser.add_argument("--csv", required=True)
        parser.add_argument("--baseline-csv", dest="baseline_csv", default=None)
        add_thread_argument(parser)

    def handle(self, *args, **options):
        seq = load_sequence(options)
        points = parse_sweep(options["sweep"])

        rows, baseline = [], []
        for q in points:
            cfg = CodecConfig.from_settings(
                quant_matrix=q, gop=options["gop"], threads=options["threads"]
            )
            total, key, wz, quality, flagged = rd_point(seq, cfg)
            rates = (format_rate(total), format_rate(key), format_rate(wz))
            rows.append((q, *rates, format_psnr(quality)))
            message = f"Q{q}: {format_rate(total)} kbps, {format_psnr(quality)} dB"
            if flagged:
                message += f" ({flagged} flagged plane(s))"
            self.stderr.write(message)

            if options["baseline_csv"]:
                kbps, quality = intra_point(seq, cfg)
                baseline.append((q, format_rate(kbps), format_psnr(quality)))

        write_csv(options["csv"], RD_HEADER, rows)
        if options["baseline_csv"]:
            write_csv(options["baseline_csv"], BASELINE_HEADER, baseline)
        self.stderr.write(self.style.SUCCESS(f"Wrote {len(rows)} RD point(s) to {options['csv']}"))
