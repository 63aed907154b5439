"""Decoder-driven delivery of syndrome chunks.

A live system would ask the encoder for each chunk over a return link.
Here the archive already holds every stored chunk, and the channel hands
them out one request at a time in ladder order so the decoder behaves as
if the encoder were answering.
"""

import logging
import threading
from collections import Counter

import numpy as np

from apps.ldpca.ldpca import build_ladder

logger = logging.getLogger(__name__)


class FeedbackChannel:
    """request(frame, band, plane) -> next chunk of accumulated bits, or None."""

    def request(self, frame, band, plane):
        raise NotImplementedError

    def consumed(self, frame, band, plane):
        raise NotImplementedError

    def request_count(self, frame, band, plane):
        """Requests made for one plane, including ones that found it exhausted."""
        raise NotImplementedError


class ArchiveFeedbackChannel(FeedbackChannel):
    """Chunks served from a parsed Bitstream.

    Planes are addressed by frame index, band and plane position within
    the band (0 = most significant).
    """

    def __init__(self, bitstream):
        self.ladder = build_ladder(bitstream.header.plane_length)
        self.records = {}
        for frame in bitstream.wz_frames():
            for band in frame.bands:
                for position, plane in enumerate(band.planes):
                    self.records[(frame.index, band.band, position)] = plane
        self.sent = Counter()
        self.requests = Counter()
        self.lock = threading.Lock()

    def _chunk(self, record, k):
        start = int(sum(len(chunk) for chunk in self.ladder[:k]))
        return np.asarray(record.bits[start : start + len(self.ladder[k])], dtype=np.uint8)

    def request(self, frame, band, plane):
        key = (frame, band, plane)
        record = self.records[key]
        with self.lock:
            self.requests[key] += 1
            k = self.sent[key]
            if k >= record.chunk_count:
                logger.debug(f"Chunks exhausted for frame {frame} band {band} plane {plane}")
                return None
            self.sent[key] = k + 1
        return self._chunk(record, k)

    def consumed(self, frame, band, plane):
        """Chunks handed out so far for one plane."""
        return self.sent[(frame, band, plane)]

    def request_count(self, frame, band, plane):
        return self.requests[(frame, band, plane)]
