import threading
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from apps.common.errors import EmptySequence, MalformedBitstream
from apps.frames.frames import Sequence, psnr
from apps.ldpca.ldpca import build_ladder
from apps.pipeline.bitstream import MAGIC, Bitstream
from apps.pipeline.config import CodecConfig, parse_gop
from apps.pipeline.decoder import KEY, WZ, decode
from apps.pipeline.encoder import encode
from apps.pipeline.feedback import ArchiveFeedbackChannel, FeedbackChannel
from apps.pipeline.reports import COMPONENTS, CRC, KEY_FRAMES, WZ_SYNDROME, rate_report
from apps.pipeline.tests.clips import drifting_clip
from apps.quantizer.quantizer import QuantMatrix, planes_to_band, quantize_bands
from apps.transform.transform import frame_to_bands

# ------------------------------------
# configuration
# ------------------------------------


def test_parse_gop():
    assert parse_gop("adaptive") is None
    assert parse_gop("4") == 4
    with pytest.raises(ValueError):
        parse_gop("often")
    with pytest.raises(ValueError):
        parse_gop(0)


def test_key_qp_follows_matrix():
    assert CodecConfig(quant_matrix=1).key_qp == 40
    assert CodecConfig(quant_matrix=8).key_qp == 22
    assert CodecConfig(quant_matrix=8, key_qp=30).key_qp == 30


def test_bad_config():
    with pytest.raises(ValueError):
        CodecConfig(quant_matrix=9)
    with pytest.raises(ValueError):
        CodecConfig(soft_input="pixel")


def test_from_settings(settings):
    settings.WZ_QUANT_MATRIX = 3
    settings.WZ_GOP = "adaptive"
    cfg = CodecConfig.from_settings()
    assert cfg.quant_matrix == 3
    assert cfg.key_qp == 36
    assert cfg.gop is None
    assert CodecConfig.from_settings(gop="4", quant_matrix=5).gop == 4


# ------------------------------------
# encoder and bitstream
# ------------------------------------


def test_single_frame_has_no_wz_records():
    bitstream, stats = encode(drifting_clip(1), CodecConfig(gop=2))
    assert len(bitstream.gops) == 1
    assert bitstream.gops[0].wz_frames == []
    assert stats.key_frames == [0]


def test_fixed_gop_structure(clip):
    bitstream, _ = encode(clip, CodecConfig(quant_matrix=4, gop=2))
    assert [gop.size for gop in bitstream.gops] == [2, 2]
    assert [frame.index for frame in bitstream.wz_frames()] == [1, 3]
    coded = QuantMatrix.get(4).coded_bands()
    for frame in bitstream.wz_frames():
        assert [band.band for band in frame.bands] == coded
        assert frame.band(0).dynamic_range is None
        assert all(band.dynamic_range >= 1 for band in frame.bands[1:])


def test_empty_sequence_rejected():
    with pytest.raises(EmptySequence):
        encode(Sequence(), CodecConfig())


def test_finer_matrix_stores_more(clip):
    coarse = encode(clip, CodecConfig(quant_matrix=1, key_qp=30))[0].serialize()
    fine = encode(clip, CodecConfig(quant_matrix=8, key_qp=30))[0].serialize()
    assert len(fine) > len(coarse)


def test_header_layout(clip):
    data = encode(clip, CodecConfig(quant_matrix=6, gop=2))[0].serialize()
    assert data[:4] == MAGIC
    assert int.from_bytes(data[5:7], "little") == 32
    assert int.from_bytes(data[7:9], "little") == 32
    assert int.from_bytes(data[13:17], "little") == 4
    assert data[17] == 6


def test_archive_round_trip(clip):
    bitstream, _ = encode(clip, CodecConfig(quant_matrix=5, gop=2))
    data = bitstream.serialize()
    parsed = Bitstream.parse(data)
    assert parsed.header == bitstream.header
    assert parsed.serialize() == data


def test_encoding_is_deterministic(clip):
    cfg = CodecConfig(quant_matrix=7, gop=2)
    assert encode(clip, cfg)[0].serialize() == encode(clip, cfg)[0].serialize()


def test_stored_syndromes_are_full(clip):
    bitstream, stats = encode(clip, CodecConfig(quant_matrix=2, gop=2), retain_planes=True)
    n = 32 * 32 // 16
    for frame in bitstream.wz_frames():
        for band in frame.bands:
            for plane in band.planes:
                assert plane.chunk_count == len(build_ladder(n))
                assert plane.bits.size == n
    assert len(stats.planes) == 2 * QuantMatrix.get(2).plane_count()


@pytest.mark.parametrize(
    "damage",
    [
        lambda data: b"WZC2" + data[4:],
        lambda data: data[:-1],
        lambda data: data + b"\x00",
        lambda data: data[:10],
    ],
)
def test_malformed_archives(clip, damage):
    data = encode(clip, CodecConfig(quant_matrix=3, gop=2))[0].serialize()
    with pytest.raises(MalformedBitstream):
        Bitstream.parse(damage(data))


# ------------------------------------
# feedback channel
# ------------------------------------


def test_chunks_arrive_in_ladder_order_once(clip):
    bitstream, _ = encode(clip, CodecConfig(quant_matrix=1, gop=2))
    channel = ArchiveFeedbackChannel(bitstream)
    record = bitstream.gops[0].wz_frames[0].band(0).planes[0]
    received = []
    while (chunk := channel.request(1, 0, 0)) is not None:
        received.append(chunk)
    assert len(received) == record.chunk_count
    assert np.array_equal(np.concatenate(received), record.bits)
    assert channel.request(1, 0, 0) is None
    assert channel.consumed(1, 0, 0) == record.chunk_count
    assert channel.request_count(1, 0, 0) == record.chunk_count + 2


class LedgerChannel(FeedbackChannel):
    """Archive chunks behind a request ledger of its own."""

    def __init__(self, bitstream):
        self.archive = ArchiveFeedbackChannel(bitstream)
        self.requests = Counter()
        self.lock = threading.Lock()

    def request(self, frame, band, plane):
        with self.lock:
            self.requests[(frame, band, plane)] += 1
        return self.archive.request(frame, band, plane)

    def consumed(self, frame, band, plane):
        return self.archive.consumed(frame, band, plane)

    def request_count(self, frame, band, plane):
        return self.requests[(frame, band, plane)]


def test_base_channel_declares_request_count():
    channel = FeedbackChannel()
    for method in (channel.request, channel.consumed, channel.request_count):
        with pytest.raises(NotImplementedError):
            method(1, 0, 0)


def test_decode_through_another_channel(clip):
    cfg = CodecConfig(quant_matrix=1, gop=2)
    bitstream, _ = encode(clip, cfg)
    channel = LedgerChannel(bitstream)
    _, stats = decode(bitstream, cfg, channel)
    assert stats.planes
    for stat in stats.planes:
        key = (stat.frame, stat.band, stat.plane)
        assert stat.requests == channel.request_count(*key)
        assert stat.chunks_consumed == channel.consumed(*key)


# ------------------------------------
# decoding
# ------------------------------------


def test_verified_planes_match_encoder(sweep):
    _, results = sweep
    for q, (_, enc_stats, _, dec_stats) in results.items():
        for stat in dec_stats.planes:
            if stat.crc_ok:
                key = (stat.frame, stat.band, stat.plane)
                assert np.array_equal(dec_stats.decoded[key], enc_stats.planes[key]), (q, key)


def test_decoded_bins_match_encoder(sweep):
    seq, results = sweep
    bitstream, _, _, dec_stats = results[8]
    matrix = QuantMatrix.get(8)
    for frame in bitstream.wz_frames():
        quantized = quantize_bands(frame_to_bands(seq[frame.index]), matrix)
        for band in matrix.coded_bands():
            stats = [s for s in dec_stats.frame_planes(frame.index) if s.band == band]
            if not all(s.crc_ok for s in stats):
                continue
            planes = [dec_stats.decoded[(frame.index, band, s.plane)] for s in stats]
            levels = matrix.levels[band]
            bins = planes_to_band(np.array(planes), levels, signed=band != 0)
            assert np.array_equal(bins, quantized[band].bins)


def test_chunks_never_exceed_ladder(sweep):
    _, results = sweep
    ladder = len(build_ladder(32 * 32 // 16))
    for _, _, _, dec_stats in results.values():
        assert all(stat.chunks_consumed <= ladder for stat in dec_stats.planes)


def test_fine_quality_on_low_motion(sweep):
    seq, results = sweep
    decoded, dec_stats = results[8][2], results[8][3]
    wz = [index for index, kind in dec_stats.frame_types.items() if kind == WZ]
    assert len(wz) == 8
    assert np.mean([psnr(decoded[i], seq[i]) for i in wz]) >= 38.0


def test_rate_and_quality_grow_with_q(sweep):
    seq, results = sweep
    rates, scores = [], []
    for q in range(1, 9):
        decoded, dec_stats = results[q][2], results[q][3]
        rates.append(rate_report(dec_stats).kbps())
        scores.append(np.mean([min(psnr(a, b), 99.0) for a, b in zip(seq, decoded)]))
    for lower, higher in zip(rates, rates[1:]):
        assert higher >= lower - 1.0
    for lower, higher in zip(scores, scores[1:]):
        assert higher >= lower - 0.1


def test_frames_interleave(sweep):
    _, results = sweep
    decoded, dec_stats = results[4][2], results[4][3]
    assert [frame.index for frame in decoded] == list(range(16))
    assert [dec_stats.frame_types[i] for i in range(4)] == [KEY, WZ, KEY, WZ]


def test_static_clip(static_clip):
    cfg = CodecConfig(quant_matrix=8, gop=2)
    bitstream, _ = encode(static_clip, cfg)
    decoded, stats = decode(bitstream, cfg)
    assert not stats.flagged
    for index in (1, 3):
        assert psnr(decoded[index], static_clip[index]) >= 40.0


def test_decoding_is_deterministic(clip):
    cfg = CodecConfig(quant_matrix=6, gop=2)
    data = encode(clip, cfg)[0].serialize()
    first, first_stats = decode(data, cfg)
    second, second_stats = decode(data, cfg)
    assert first == second
    assert first_stats.planes == second_stats.planes


def test_tampered_crc_is_flagged(clip):
    cfg = CodecConfig(quant_matrix=2, gop=2)
    bitstream, _ = encode(clip, cfg)
    plane = bitstream.gops[0].wz_frames[0].band(0).planes[0]
    plane.crc ^= 0xFF
    decoded, stats = decode(bitstream, cfg)
    assert len(decoded) == len(clip)
    assert (1, 0, 0) in {(s.frame, s.band, s.plane) for s in stats.flagged}
    assert stats.plane(1, 0, 0).chunks_consumed == plane.chunk_count


def test_trailing_gop_uses_its_own_key():
    seq = drifting_clip(3, speed=0.0)
    cfg = CodecConfig(quant_matrix=3, gop=4)
    bitstream, _ = encode(seq, cfg)
    assert [gop.size for gop in bitstream.gops] == [3]
    decoded, stats = decode(bitstream, cfg)
    assert [stats.frame_types[i] for i in range(3)] == [KEY, WZ, WZ]
    assert psnr(decoded[2], seq[2]) > 30.0


def test_references_are_decoded_key_frames(clip):
    cfg = CodecConfig(quant_matrix=3, gop=2)
    decoded, stats = decode(encode(clip, cfg)[0], cfg)
    # key frames are reconstructions, not the originals
    assert decoded[0] != clip[0]
    assert stats.side_info[1].shape == clip[1].shape


# ------------------------------------
# rate report
# ------------------------------------


def test_components_sum_to_total(sweep):
    _, results = sweep
    report = rate_report(results[5][3])
    assert sum(report.bits[name] for name in COMPONENTS) == report.total_bits
    assert report.kbps() == pytest.approx(sum(report.kbps(name) for name in COMPONENTS))


def test_consumed_and_unused_cover_the_archive(sweep):
    _, results = sweep
    bitstream, _, _, dec_stats = results[3]
    report = rate_report(dec_stats)
    padding = 8 * len(bitstream.serialize()) - (report.total_bits + report.unused_bits)
    assert 0 <= padding < 8 * len(dec_stats.planes)


def test_no_wz_frames_no_wz_rate():
    cfg = CodecConfig(gop=2)
    _, stats = decode(encode(drifting_clip(1), cfg)[0], cfg)
    report = rate_report(stats)
    assert report.bits[WZ_SYNDROME] == 0
    assert report.bits[CRC] == 0
    assert report.bits[KEY_FRAMES] > 0


def test_doubling_fps_doubles_rate(sweep):
    _, results = sweep
    stats = results[2][3]
    base = rate_report(stats, fps=Fraction(15))
    double = rate_report(stats, fps=Fraction(30))
    assert double.kbps() == pytest.approx(2 * base.kbps())
    assert double.frame_kbps(0) == pytest.approx(2 * base.frame_kbps(0))
