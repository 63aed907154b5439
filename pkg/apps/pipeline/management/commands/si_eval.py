"""
Side-information quality per WZ frame against plain averaging.

    wz si-eval --input clip.yuv --width 176 --height 144 --gop 2 --csv si.csv

References are the original frames, so the table isolates the
interpolation itself from key-frame coding loss.
"""

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from apps.frames.frames import psnr
from apps.pipeline.management.commands._shared import (
    MALFORMED_INPUT,
    add_sequence_arguments,
    format_psnr,
    load_sequence,
    write_csv,
)
from apps.sideinfo.motion import SearchConfig
from apps.sideinfo.sideinfo import (
    InterpolationContext,
    average_interpolation,
    estimate,
    plan_interpolation,
)
from apps.splitter.splitter import fixed_plan

SI_HEADER = ("frame", "psnr_si", "psnr_average")


def evaluate(seq, gop, cfg=None):
    """(frame, psnr_si, psnr_average) for every interpolated frame."""
    rows = []
    plan = fixed_plan(len(seq), gop)
    for start, size in zip(plan.starts(), plan.sizes):
        end = start + size
        closing = seq[end] if end < len(seq) else seq[start]
        for step in plan_interpolation(size):
            x_b = seq[start + step.backward]
            x_f = closing if step.forward == size else seq[start + step.forward]
            target = seq[start + step.target]
            ctx = InterpolationContext(x_b, x_f, step.tau)
            si = estimate(ctx, cfg, target.index)
            rows.append(
                (target.index, psnr(si.frame, target), psnr(average_interpolation(ctx), target))
            )
    return rows


class Command(BaseCommand):
    help = "Compare motion-compensated side information with pixel averaging"

    def add_arguments(self, parser):
        add_sequence_arguments(parser)
        parser.add_argument("--gop", type=int, default=2)
        parser.add_argument("--csv", required=True)

    def handle(self, *args, **options):
        seq = load_sequence(options)
        if not 1 <= options["gop"] <= 0xFF:
            raise CommandError(
                f"GOP must be in [1, 255], got {options['gop']}", returncode=MALFORMED_INPUT
            )

        rows = evaluate(seq, options["gop"], SearchConfig.from_settings())
        write_csv(
            options["csv"],
            SI_HEADER,
            [(index, format_psnr(si), format_psnr(avg)) for index, si, avg in rows],
        )

        if rows:
            finite = [(si, avg) for _, si, avg in rows if np.isfinite(si) and np.isfinite(avg)]
            if finite:
                gain = np.mean([si - avg for si, avg in finite])
                self.stderr.write(f"Mean SI gain over averaging: {gain:.2f} dB")
        self.stderr.write(self.style.SUCCESS(f"Evaluated {len(rows)} WZ frame(s)"))
