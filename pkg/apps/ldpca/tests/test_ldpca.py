import math

import numpy as np
import pytest

from apps.common.errors import LengthMismatch
from apps.ldpca.ldpca import (
    PlaneDecoder,
    accumulate,
    build_code,
    build_ladder,
    crc8,
    deaccumulate,
    decode_plane,
    encode_plane,
    entropy_floor,
    identity_code,
    merge_constraints,
    syndrome,
    verify,
)
from apps.ldpca.tests.channel import (
    binary_entropy,
    chunks_needed,
    decode_every_prefix,
    flip_channel,
    prefixes,
)

# ------------------------------------
# construction
# ------------------------------------


def test_construction_is_deterministic():
    first = build_code.__wrapped__(128, 3, 7)
    second = build_code.__wrapped__(128, 3, 7)
    assert np.array_equal(first.checks, second.checks)
    assert first.serialize() == second.serialize()
    assert first.serialize() != build_code.__wrapped__(128, 3, 500).serialize()


def test_regular_variable_degree(small_code):
    degrees = np.bincount(small_code.variables, minlength=small_code.n)
    assert np.all(degrees == 3)
    for variable in range(small_code.n):
        touched = small_code.checks[small_code.variables == variable]
        assert variable in touched
        assert len(set(touched.tolist())) == 3


def test_serialized_layout(small_code):
    blob = small_code.serialize()
    assert blob[:4] == b"LDPA"
    assert blob[4] == 1
    assert int.from_bytes(blob[5:9], "little") == 256
    assert blob[9] == 3
    assert int.from_bytes(blob[18:22], "little") == 256 * 3
    assert len(blob) == 22 + 256 * 3 * 8


def test_rejects_short_planes():
    with pytest.raises(LengthMismatch):
        build_code(8)


# ------------------------------------
# ladder
# ------------------------------------


def test_qcif_ladder_has_66_increments(qcif_code):
    assert qcif_code.chunk_size == 24
    assert qcif_code.chunk_count == 66
    assert all(len(chunk) == 24 for chunk in qcif_code.ladder)


@pytest.mark.parametrize("n", [16, 100, 256, 1584, 1000])
def test_ladder_partitions_positions(n):
    ladder = build_ladder(n)
    order = np.concatenate(ladder)
    assert sorted(order.tolist()) == list(range(n))
    # the first chunk pins the end of the accumulator
    assert n - 1 in ladder[0]


def test_first_chunk_is_evenly_spaced(qcif_code):
    first = np.sort(qcif_code.ladder[0])
    assert np.all(np.diff(first) == qcif_code.chunk_count)


# ------------------------------------
# encoding
# ------------------------------------


def test_all_zero_plane(small_code):
    plane = encode_plane(np.zeros(256, dtype=np.uint8), small_code)
    assert not plane.acc.any()
    assert plane.crc == 0


def test_identity_code_accumulates_source(rng):
    code = identity_code(64)
    bits = rng.integers(0, 2, size=64, dtype=np.uint8)
    plane = encode_plane(bits, code)
    assert np.array_equal(plane.acc, np.bitwise_xor.accumulate(bits))


def test_deaccumulation_recovers_syndrome(small_code, rng):
    bits = rng.integers(0, 2, size=256, dtype=np.uint8)
    plane = encode_plane(bits, small_code)
    assert np.array_equal(deaccumulate(plane.acc), syndrome(bits, small_code))
    assert np.array_equal(accumulate(deaccumulate(plane.acc)), plane.acc)


def test_encode_length_mismatch(small_code):
    with pytest.raises(LengthMismatch):
        encode_plane(np.zeros(255), small_code)


# ------------------------------------
# CRC-8
# ------------------------------------


def test_crc_check_value():
    bits = np.unpackbits(np.frombuffer(b"123456789", dtype=np.uint8))
    assert crc8(bits) == 0xF4


def test_crc_empty():
    assert crc8([]) == 0
    assert verify([], 0x00)


def test_crc_detects_every_single_flip(rng):
    bits = rng.integers(0, 2, size=1024, dtype=np.uint8)
    crc = crc8(bits)
    assert verify(bits, crc)
    for position in range(bits.size):
        flipped = bits.copy()
        flipped[position] ^= 1
        assert not verify(flipped, crc)


def test_crc_pads_partial_byte():
    assert crc8([1, 0, 1]) == crc8([1, 0, 1, 0, 0, 0, 0, 0])


# ------------------------------------
# decoding
# ------------------------------------


def test_certain_zeros_decode_in_one_iteration(small_code):
    plane = encode_plane(np.zeros(256, dtype=np.uint8), small_code)
    received = plane.acc[small_code.order[: small_code.prefix_length(1)]]
    result = decode_plane(np.full(256, 25.0), received, small_code)
    assert result.converged
    assert result.iterations == 1
    assert not result.bits.any()


@pytest.mark.parametrize("n", [256, 1584])
def test_full_rate_recovers_without_side_information(n, rng):
    code = build_code(n, 3, 0)
    for _ in range(100):
        bits = rng.integers(0, 2, size=n, dtype=np.uint8)
        plane = encode_plane(bits, code)
        result = decode_plane(np.zeros(n), plane.acc[code.order], code)
        assert result.converged
        assert np.array_equal(result.bits, bits)


def test_merged_constraints_hold_for_source(small_code, rng):
    bits = rng.integers(0, 2, size=256, dtype=np.uint8)
    plane = encode_plane(bits, small_code)
    for chunks in (1, 5, 20):
        received = plane.acc[small_code.order[: small_code.prefix_length(chunks)]]
        merged = merge_constraints(small_code, received)
        parity = np.bincount(
            merged.checks, weights=bits[merged.variables], minlength=merged.positions.size
        )
        assert np.array_equal(parity.astype(int) & 1, merged.targets)


def test_decode_rejects_bad_lengths(small_code):
    with pytest.raises(LengthMismatch):
        decode_plane(np.zeros(10), np.zeros(3), small_code)
    with pytest.raises(LengthMismatch):
        decode_plane(np.zeros(256), [], small_code)


def test_hint_meeting_every_constraint_is_returned(small_code, rng):
    source, llr = flip_channel(rng, 256, 0.05)
    plane = encode_plane(source, small_code)
    for chunks in range(1, small_code.chunk_count + 1):
        received = plane.acc[small_code.order[: small_code.prefix_length(chunks)]]
        result = decode_plane(llr, received, small_code, hint=source)
        assert result.converged
        assert result.iterations == 0
        assert np.array_equal(result.bits, source)


def test_hint_breaking_a_constraint_is_ignored(small_code, rng):
    source = rng.integers(0, 2, size=256, dtype=np.uint8)
    plane = encode_plane(source, small_code)
    wrong = source.copy()
    wrong[0] ^= 1
    result = decode_plane(np.zeros(256), plane.acc[small_code.order], small_code, hint=wrong)
    assert np.array_equal(result.bits, source)


def test_entropy_floor():
    assert entropy_floor(np.zeros(10)) == pytest.approx(10.0)
    assert entropy_floor(np.full(10, 25.0)) < 1e-6
    p = 0.05
    llr = np.full(100, math.log((1 - p) / p))
    assert entropy_floor(llr) == pytest.approx(100 * binary_entropy(p))


def test_plane_decoder_waits_for_the_floor(small_code, rng):
    source, llr = flip_channel(rng, 256, 0.1)
    received, crc = prefixes(small_code, source)
    decoder = PlaneDecoder(small_code, llr, crc)
    assert not decoder.update(received[0])
    assert decoder.attempts == 0
    assert decoder.iterations == 0
    assert np.array_equal(decoder.hard_decision(), (llr < 0).astype(np.uint8))
    assert decoder.update(received[-1])
    assert np.array_equal(decoder.result.bits, source)


def test_rate_is_monotone_in_chunks(small_code, rng):
    for _ in range(40):
        source, llr = flip_channel(rng, 256, 0.05)
        outcomes = decode_every_prefix(small_code, source, llr)
        first = next(k for k, (verified, _) in enumerate(outcomes) if verified)
        for verified, bits in outcomes[first:]:
            assert verified
            assert np.array_equal(bits, source)


def test_rate_adapts_to_crossover(qcif_code, rng):
    trials = 100
    mean_rates = []
    for p in (0.01, 0.05, 0.10):
        rates, recovered = [], 0
        for _ in range(trials):
            source, llr = flip_channel(rng, qcif_code.n, p)
            needed, bits = chunks_needed(qcif_code, source, llr)
            recovered += np.array_equal(bits, source)
            rates.append(qcif_code.prefix_length(needed) / qcif_code.n)
        assert recovered >= 0.98 * trials
        mean_rates.append(np.mean(rates))
    assert mean_rates[0] < mean_rates[1] < mean_rates[2]
    assert mean_rates[1] < 1.0
