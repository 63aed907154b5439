import pytest

from apps.frames.frames import write_raw
from apps.pipeline.config import CodecConfig
from apps.pipeline.decoder import decode
from apps.pipeline.encoder import encode
from apps.pipeline.tests.clips import drifting_clip


@pytest.fixture
def clip():
    return drifting_clip(4)


@pytest.fixture
def static_clip():
    return drifting_clip(4, speed=0.0)


@pytest.fixture
def raw_clip(tmp_path):
    path = tmp_path / "clip.yuv"
    path.write_bytes(write_raw(drifting_clip(4)))
    return path


@pytest.fixture(scope="module")
def sweep():
    """Encode and decode a 16-frame low-motion clip at every Q point."""
    seq = drifting_clip(16)
    results = {}
    for q in range(1, 9):
        cfg = CodecConfig(quant_matrix=q, gop=2)
        bitstream, enc_stats = encode(seq, cfg, retain_planes=True)
        decoded, dec_stats = decode(bitstream.serialize(), cfg)
        results[q] = (bitstream, enc_stats, decoded, dec_stats)
    return seq, results
