"""Synthetic clips for end-to-end tests."""

import numpy as np

from apps.frames.frames import Frame, Sequence


def drifting_clip(count, size=32, speed=1.0):
    """Smooth pattern sliding right by `speed` px per frame."""
    y, x = np.mgrid[0:size, 0:size].astype(np.float64)
    frames = []
    for t in range(count):
        u = x - speed * t
        plane = 128 + 45 * np.sin(u / 4.0) * np.cos(y / 5.0) + 1.5 * u - 0.8 * y
        frames.append(Frame(np.clip(np.rint(plane), 0, 255).astype(np.uint8), t))
    return Sequence(frames)
