"""Rate-adaptive LDPC accumulate (LDPCA) syndrome coding.

The encoder computes the syndrome of a bit plane under a sparse regular
syndrome former and accumulates it modulo 2. The accumulated bits are sent
in chunks along a ladder; every received prefix turns into a set of merged
parity constraints, which a log-domain sum-product decoder then enforces
against the side information.
"""

import logging
import math
import struct
from dataclasses import dataclass
from functools import lru_cache

import galois
import numpy as np

from apps.common.errors import ConstructionFailed, LengthMismatch

logger = logging.getLogger(__name__)

GF2 = galois.GF(2)

# number of feedback increments per plane
LADDER_STEPS = 66

MAX_RESEEDS = 64
LLR_CLAMP = 25.0

GRAPH_MAGIC = b"LDPA"
GRAPH_VERSION = 1

# phi() is evaluated on arguments clipped to this range
PHI_MIN = 1e-12
PHI_MAX = 60.0


@dataclass(frozen=True, eq=False)
class LdpcaCode:
    """A syndrome-former graph and its transmission ladder.

    checks[e], variables[e] is edge e; variable j always touches check j.
    ladder holds the accumulated-syndrome positions sent by each feedback
    increment, in transmission order.
    """

    n: int
    d_v: int
    seed: int
    checks: np.ndarray
    variables: np.ndarray
    ladder: tuple
    inverse: np.ndarray | None = None

    @property
    def chunk_size(self):
        return chunk_size(self.n)

    @property
    def chunk_count(self):
        return len(self.ladder)

    @property
    def order(self):
        """Every accumulated-syndrome position in transmission order."""
        return np.concatenate(self.ladder)

    def prefix_length(self, chunks):
        """Accumulated bits carried by the first `chunks` increments."""
        return int(sum(len(chunk) for chunk in self.ladder[:chunks]))

    def serialize(self):
        """Versioned binary graph dump; equal (n, d_v, seed) give equal bytes."""
        header = struct.pack(
            "<4sBIBQI",
            GRAPH_MAGIC,
            GRAPH_VERSION,
            self.n,
            self.d_v,
            self.seed & 0xFFFFFFFFFFFFFFFF,
            len(self.checks),
        )
        edges = np.stack([self.checks, self.variables], axis=1).astype("<u4")
        return header + edges.tobytes()


@dataclass(frozen=True, eq=False)
class SyndromePlane:
    acc: np.ndarray
    crc: int
    chunk_size: int


@dataclass(frozen=True, eq=False)
class DecodeResult:
    bits: np.ndarray
    converged: bool
    iterations: int
    # posterior LLRs after the last iteration; the input LLRs at full rate
    llr: np.ndarray | None = None


def chunk_size(n):
    return max(1, n // LADDER_STEPS)


def _farthest_first(count):
    """Slots 0..count-1 on a circle, each next one farthest from those taken."""
    slots = np.arange(count)
    order = [0]
    distance = np.minimum(slots, count - slots)
    while len(order) < count:
        slot = int(np.argmax(distance))
        order.append(slot)
        gap = np.abs(slots - slot)
        distance = np.minimum(distance, np.minimum(gap, count - gap))
    return order


def build_ladder(n):
    """Split the n accumulated positions into transmission chunks.

    Positions are grouped by (n - 1 - i) mod K, K being the ladder length,
    and the groups are sent in farthest-first order starting with the one
    holding n - 1, so every prefix constrains the whole plane evenly.
    Sending positions lowest index first instead leaves the tail of the
    plane without any merged check until the last chunks arrive.
    """
    size = chunk_size(n)
    count = math.ceil(n / size)
    positions = np.arange(n)
    residue = (n - 1 - positions) % count
    ordered = np.concatenate(
        [np.sort(positions[residue == slot]) for slot in _farthest_first(count)]
    )
    return tuple(ordered[start : start + size] for start in range(0, n, size))


def _random_graph(n, d_v, seed):
    rng = np.random.default_rng(seed)
    checks = []
    for variable in range(n):
        others = rng.choice(n - 1, size=d_v - 1, replace=False)
        # skip over the variable's own check so the d_v checks stay distinct
        others = others + (others >= variable)
        checks.append(np.concatenate(([variable], np.sort(others))))
    checks = np.concatenate(checks).astype(np.int64)
    variables = np.repeat(np.arange(n, dtype=np.int64), d_v)
    return checks, variables


def _former_matrix(n, checks, variables):
    matrix = np.zeros((n, n), dtype=np.uint8)
    np.bitwise_xor.at(matrix, (checks, variables), 1)
    return matrix


@lru_cache(maxsize=64)
def build_code(n, d_v=3, seed=0):
    """Deterministic regular LDPCA code for planes of n bits.

    Args:
        n (int): plane length, at least 16
        d_v (int): checks per variable node
        seed (int): 64-bit seed for the pseudo-random graph

    Returns:
        code (LdpcaCode): a code whose full-rate syndrome former is invertible

    Notes:
        A singular former is rebuilt with seed + 1, up to 64 times.

    """
    if n < 16:
        raise LengthMismatch(f"plane length must be >= 16, got {n}")
    if not 1 <= d_v < n:
        raise ValueError(f"variable degree must be in [1, {n - 1}], got {d_v}")

    for attempt in range(MAX_RESEEDS):
        trial_seed = (seed + attempt) & 0xFFFFFFFFFFFFFFFF
        checks, variables = _random_graph(n, d_v, trial_seed)
        try:
            inverse = np.linalg.inv(GF2(_former_matrix(n, checks, variables)))
        except np.linalg.LinAlgError:
            logger.warning(f"LDPCA former n={n} seed={trial_seed} is singular, reseeding")
            continue
        return LdpcaCode(
            n,
            d_v,
            trial_seed,
            checks,
            variables,
            build_ladder(n),
            np.asarray(inverse, dtype=np.uint8),
        )
    raise ConstructionFailed(f"no full-rank LDPCA former for n={n} after {MAX_RESEEDS} seeds")


def identity_code(n):
    """Diagnostic code whose syndrome node i sees only variable i."""
    positions = np.arange(n, dtype=np.int64)
    return LdpcaCode(
        n, 1, 0, positions, positions.copy(), build_ladder(n), np.eye(n, dtype=np.uint8)
    )


def _as_bits(bits, n=None):
    bits = np.asarray(bits).astype(np.uint8).ravel()
    if n is not None and bits.size != n:
        raise LengthMismatch(f"expected {n} bits, got {bits.size}")
    return bits


def syndrome(bits, code):
    counts = np.bincount(code.checks, weights=bits[code.variables], minlength=code.n)
    return counts.astype(np.int64).astype(np.uint8) & 1


def accumulate(syndromes):
    return np.bitwise_xor.accumulate(np.asarray(syndromes, dtype=np.uint8))


def deaccumulate(acc):
    acc = np.asarray(acc, dtype=np.uint8)
    return acc ^ np.concatenate(([0], acc[:-1])).astype(np.uint8)


def encode_plane(bits, code):
    """Accumulated syndrome and CRC-8 of one bit plane."""
    bits = _as_bits(bits, code.n)
    acc = accumulate(syndrome(bits, code))
    return SyndromePlane(acc, crc8(bits), code.chunk_size)


# ------------------------------------
# CRC-8
# ------------------------------------


def _crc_table(poly=0x07):
    table = []
    for byte in range(256):
        crc = byte
        for _ in range(8):
            crc = ((crc << 1) ^ poly) & 0xFF if crc & 0x80 else (crc << 1) & 0xFF
        table.append(crc)
    return tuple(table)


CRC_TABLE = _crc_table()


def crc8(bits):
    """CRC-8 (poly 0x07, init 0, unreflected) over MSB-first packed bits."""
    crc = 0
    for byte in np.packbits(_as_bits(bits)).tobytes():
        crc = CRC_TABLE[crc ^ byte]
    return crc


def verify(bits, crc):
    return crc8(bits) == crc


# ------------------------------------
# decoding
# ------------------------------------


@dataclass(frozen=True, eq=False)
class MergedConstraints:
    """Parity checks implied by a received prefix of accumulated bits."""

    positions: np.ndarray  # known accumulated positions, ascending
    values: np.ndarray  # accumulated bits at those positions
    targets: np.ndarray  # parity each merged check must meet
    checks: np.ndarray  # merged check index per edge
    variables: np.ndarray


def merge_constraints(code, received):
    """Turn a ladder-order prefix of accumulated bits into parity checks.

    Consecutive syndrome nodes between two known accumulated positions fold
    into one check whose edges are the variables they touch an odd number of
    times. Nodes past the last known position carry no information.
    """
    received = _as_bits(received)
    if not code.ladder or not len(code.ladder[0]) <= received.size <= code.n:
        raise LengthMismatch(
            f"received {received.size} accumulated bits; need between "
            f"{len(code.ladder[0]) if code.ladder else 1} and {code.n}"
        )
    known = code.order[: received.size]
    sort = np.argsort(known)
    positions, values = known[sort], received[sort]
    targets = values ^ np.concatenate(([0], values[:-1])).astype(np.uint8)

    group = np.searchsorted(positions, np.arange(code.n), side="left")
    edge_group = group[code.checks]
    keep = edge_group < positions.size
    keys = edge_group[keep] * code.n + code.variables[keep]
    unique, counts = np.unique(keys, return_counts=True)
    odd = unique[counts % 2 == 1]
    return MergedConstraints(positions, values, targets, odd // code.n, odd % code.n)


def _phi(x):
    x = np.clip(x, PHI_MIN, PHI_MAX)
    return np.log1p(2.0 / np.expm1(x))


def syndrome_distance(bits, code, constraints):
    """Hamming distance between received and re-encoded accumulated bits."""
    acc = accumulate(syndrome(bits, code))
    return int(np.count_nonzero(acc[constraints.positions] != constraints.values))


def decode_plane(llr, received, code, max_iter=100, hint=None):
    """Sum-product decoding of one plane from a received syndrome prefix.

    Args:
        llr (ndarray): n log-likelihood ratios, positive meaning bit 0
        received (ndarray): accumulated bits in ladder order, a prefix of
            at least one chunk
        code (LdpcaCode): the code shared with the encoder
        max_iter (int): belief-propagation iteration cap
        hint (ndarray): a candidate plane, returned as is when it already
            meets every received constraint

    Returns:
        result (DecodeResult): converged is True when the decoded plane
        re-encodes to every received accumulated bit

    """
    llr = np.asarray(llr, dtype=np.float64).ravel()
    if llr.size != code.n:
        raise LengthMismatch(f"expected {code.n} LLRs, got {llr.size}")
    llr = np.clip(np.nan_to_num(llr, nan=0.0), -LLR_CLAMP, LLR_CLAMP)
    constraints = merge_constraints(code, received)

    if hint is not None:
        hint = _as_bits(hint, code.n)
        if syndrome_distance(hint, code, constraints) == 0:
            return DecodeResult(hint.copy(), True, 0, llr)

    if constraints.positions.size == code.n and code.inverse is not None:
        syndromes = deaccumulate(constraints.values)
        bits = (code.inverse.astype(np.int64) @ syndromes.astype(np.int64)) & 1
        return DecodeResult(bits.astype(np.uint8), True, 0, llr)

    checks, variables = constraints.checks, constraints.variables
    group_count = constraints.positions.size
    target = constraints.targets[checks].astype(np.int64)
    v2c = llr[variables]
    total = llr
    bits = (llr < 0).astype(np.uint8)

    for iteration in range(1, max_iter + 1):
        magnitude = _phi(np.abs(v2c))
        negative = (v2c < 0).astype(np.int64)
        magnitude_sum = np.bincount(checks, weights=magnitude, minlength=group_count)
        negative_sum = np.bincount(checks, weights=negative, minlength=group_count)
        parity = (negative_sum[checks].astype(np.int64) - negative + target) & 1
        c2v = np.where(parity, -1.0, 1.0) * _phi(magnitude_sum[checks] - magnitude)

        total = llr + np.bincount(variables, weights=c2v, minlength=code.n)
        v2c = total[variables] - c2v
        bits = (total < 0).astype(np.uint8)
        if syndrome_distance(bits, code, constraints) == 0:
            return DecodeResult(bits, True, iteration, total)

    return DecodeResult(bits, False, max_iter, total)


def entropy_floor(llr):
    """Conditional entropy of a plane given its soft input, in bits.

    No syndrome prefix shorter than this can pin the plane down.
    """
    p = 1.0 / (1.0 + np.exp(-np.abs(np.asarray(llr, dtype=np.float64))))
    with np.errstate(divide="ignore", invalid="ignore"):
        h = -(p * np.log2(p) + (1 - p) * np.log2(1 - p))
    return float(np.nansum(h))


class PlaneDecoder:
    """Rate-adaptive decoding of one plane as its syndrome prefix grows.

    The last CRC-verified plane is handed back to decode_plane as a hint,
    so once a prefix decodes, every longer prefix that the plane still
    satisfies decodes to the same bits.
    """

    def __init__(self, code, llr, crc, max_iter=100, floor=True):
        self.code = code
        self.llr = np.asarray(llr, dtype=np.float64).ravel()
        self.crc = crc
        self.max_iter = max_iter
        self.floor = entropy_floor(self.llr) if floor else 0.0
        self.result = None
        self.verified = False
        self.attempts = 0

    def ready(self, size):
        """Whether a prefix of `size` accumulated bits is worth decoding."""
        return size >= self.floor or size == self.code.n

    def update(self, received):
        """Decode a ladder-order prefix; True once the plane is verified."""
        received = _as_bits(received)
        if not self.ready(received.size):
            return False
        hint = self.result.bits if self.verified else None
        self.result = decode_plane(self.llr, received, self.code, self.max_iter, hint)
        self.attempts += 1
        self.verified = bool(self.result.converged and verify(self.result.bits, self.crc))
        return self.verified

    @property
    def iterations(self):
        return self.result.iterations if self.result is not None else 0

    def hard_decision(self):
        """Signs of the last posterior, or of the soft input if nothing was tried."""
        llr = self.result.llr if self.result is not None else self.llr
        return (np.asarray(llr) < 0).astype(np.uint8)
