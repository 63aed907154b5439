"""Bit-flip channel harness shared by the rate tests."""

import math

import numpy as np

from apps.ldpca.ldpca import PlaneDecoder, encode_plane


def binary_entropy(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def flip_channel(rng, n, p):
    source = rng.integers(0, 2, size=n, dtype=np.uint8)
    flips = (rng.random(n) < p).astype(np.uint8)
    side_info = source ^ flips
    magnitude = math.log((1 - p) / p)
    llr = np.where(side_info == 0, magnitude, -magnitude)
    return source, llr


def prefixes(code, source):
    """Ladder-order accumulated prefixes of 1..chunk_count chunks, and the CRC."""
    plane = encode_plane(source, code)
    order = code.order
    received = [plane.acc[order[: code.prefix_length(k)]] for k in range(1, code.chunk_count + 1)]
    return received, plane.crc


def chunks_needed(code, source, llr, max_iter=100):
    """Feed chunks one at a time from the first until the CRC verifies."""
    received, crc = prefixes(code, source)
    decoder = PlaneDecoder(code, llr, crc, max_iter)
    for chunks, prefix in enumerate(received, start=1):
        if decoder.update(prefix):
            return chunks, decoder.result.bits
    return None, None


def decode_every_prefix(code, source, llr, max_iter=100):
    """(verified, bits) after each chunk, continuing past the first success."""
    received, crc = prefixes(code, source)
    decoder = PlaneDecoder(code, llr, crc, max_iter)
    outcomes = []
    for prefix in received:
        verified = decoder.update(prefix)
        outcomes.append((verified, decoder.result.bits.copy() if verified else None))
    return outcomes
