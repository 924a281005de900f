"""Two-party Winnow and BINARY passes with leak accounting.

Alice's key is the reference; Bob flips bits to match. Within every N-bit
block, index 0 is the bit discarded after the parity comparison and indexes
1..N-1 carry Hamming positions 1..n_h, so a parity mismatch with a zero
syndrome difference means the discarded bit itself held the error.

A "communication" is one message round: the parity comparison is one round
(both parties' parity frames), and the syndrome or bisection exchanges that
follow are one round each. Revealed-bit accounting nets each parity
comparison to one bit and each syndrome to m bits.

Message frames follow a fixed wire format (little-endian):

    u32 frame length | u64 session_id | u16 pass_index | u8 kind |
    u32 block_count | packed payload bits

Payload bits are packed little-endian within bytes: parity payloads carry
one bit per block in block order; syndrome payloads carry m bits per
mismatched block in mismatched-block order, least significant syndrome bit
first.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

import numpy as np

from .hamming import HammingParams


class ProtocolError(Exception):
    """Session abort: the two parties' states are inconsistent."""


@dataclass
class KeyString:
    """One party's key material plus a pass counter."""

    bits: np.ndarray
    generation: int = 0

    def __post_init__(self) -> None:
        self.bits = np.asarray(self.bits, dtype=np.uint8)

    def __len__(self) -> int:
        return len(self.bits)


class MessageKind(IntEnum):
    PARITY = 0
    SYNDROME = 1
    PARITY_REPLY = 2
    SYNDROME_REPLY = 3


_HEADER = struct.Struct("<QHBI")
_LENGTH = struct.Struct("<I")


@dataclass(frozen=True)
class WinnowMessage:
    """One public message of a session."""

    session_id: int
    pass_index: int
    kind: MessageKind
    block_count: int
    payload_bits: np.ndarray

    def encode(self) -> bytes:
        header = _HEADER.pack(self.session_id, self.pass_index,
                              int(self.kind), self.block_count)
        payload = np.packbits(self.payload_bits.astype(np.uint8),
                              bitorder="little").tobytes()
        return _LENGTH.pack(len(header) + len(payload)) + header + payload

    @classmethod
    def decode(cls, data: bytes, bit_count: int | None = None) -> "WinnowMessage":
        (length,) = _LENGTH.unpack_from(data)
        if len(data) != _LENGTH.size + length:
            raise ProtocolError(f"frame length {length} does not match {len(data)} bytes")
        session_id, pass_index, kind, block_count = _HEADER.unpack_from(data, _LENGTH.size)
        raw = np.frombuffer(data, dtype=np.uint8, offset=_LENGTH.size + _HEADER.size)
        bits = np.unpackbits(raw, bitorder="little")
        if bit_count is not None:
            bits = bits[:bit_count]
        return cls(session_id=session_id, pass_index=pass_index,
                   kind=MessageKind(kind), block_count=block_count,
                   payload_bits=bits)

    def syndromes(self, m: int) -> np.ndarray:
        """Unpack a syndrome payload into block_count integer syndromes."""
        bits = self.payload_bits[: self.block_count * m].reshape(self.block_count, m)
        return (bits.astype(np.int64) << np.arange(m)).sum(axis=1)


def _pack_syndromes(values: np.ndarray, m: int) -> np.ndarray:
    bits = np.zeros(len(values) * m, dtype=np.uint8)
    for i in range(m):
        bits[i::m] = (values >> i) & 1
    return bits


@dataclass
class Transcript:
    """Ordered capture of a session's public messages.

    The file form is one hex-encoded frame per line under a header line
    recording the per-pass block sizes and the public shuffle seeds, so a
    captured session can be replayed bit for bit. The block sizes are what
    lets a reader strip the byte-boundary padding from syndrome payloads.
    """

    session_id: int
    block_sizes: tuple[int, ...] = ()
    protocol: str = "winnow"
    seeds: tuple[int, ...] = ()
    frames: list[WinnowMessage] = field(default_factory=list)

    def append(self, message: WinnowMessage) -> None:
        self.frames.append(message)

    def save(self, path: str | Path) -> None:
        lines = [
            f"winnow-transcript v1 session={self.session_id:016x} "
            f"protocol={self.protocol} "
            f"blocks={','.join(str(n) for n in self.block_sizes)} "
            f"seeds={','.join(str(s) for s in self.seeds)}"
        ]
        lines.extend(frame.encode().hex() for frame in self.frames)
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Transcript":
        lines = Path(path).read_text().splitlines()
        if not lines or not lines[0].startswith("winnow-transcript v1 "):
            raise ProtocolError(f"not a transcript file: {path}")
        fields = dict(part.split("=", 1) for part in lines[0].split()[2:])
        transcript = cls(
            session_id=int(fields["session"], 16),
            block_sizes=tuple(int(n) for n in fields["blocks"].split(",") if n),
            protocol=fields["protocol"],
            seeds=tuple(int(s) for s in fields["seeds"].split(",") if s),
        )
        for line in lines[1:]:
            if not line:
                continue
            frame = WinnowMessage.decode(bytes.fromhex(line))
            if frame.kind in (MessageKind.SYNDROME, MessageKind.SYNDROME_REPLY):
                if frame.pass_index >= len(transcript.block_sizes):
                    raise ProtocolError(
                        f"no block size recorded for pass {frame.pass_index}")
                per_block = transcript.block_sizes[frame.pass_index].bit_length() - 1
            else:
                per_block = 1
            transcript.frames.append(
                WinnowMessage.decode(bytes.fromhex(line),
                                     bit_count=frame.block_count * per_block)
            )
        return transcript


@dataclass(frozen=True)
class PassLeak:
    """Public-information accounting for one pass."""

    pass_index: int
    block_size: int
    blocks: int
    mismatched_blocks: int
    bits_revealed: int
    bits_discarded: int
    messages_sent: int


@dataclass
class LeakLedger:
    """Running account of revealed bits, discarded bits and message rounds."""

    entries: list[PassLeak] = field(default_factory=list)

    def add(self, entry: PassLeak) -> None:
        self.entries.append(entry)

    @property
    def next_pass_index(self) -> int:
        return len(self.entries)

    @property
    def total_bits_revealed(self) -> int:
        return sum(e.bits_revealed for e in self.entries)

    @property
    def total_bits_discarded(self) -> int:
        return sum(e.bits_discarded for e in self.entries)

    @property
    def total_messages(self) -> int:
        return sum(e.messages_sent for e in self.entries)

    @property
    def super_redundant_debt(self) -> int:
        """Revealed bits not yet paid for by discards (BINARY without
        privacy maintenance accumulates these)."""
        return self.total_bits_revealed - self.total_bits_discarded


@dataclass(frozen=True)
class ShufflePlan:
    """Deterministic public permutation both parties apply between passes.

    The seed is public; the permutation depends only on seed and length,
    never on bit values, so publishing it leaks nothing.
    """

    seed: int
    permutation: np.ndarray

    @classmethod
    def from_seed(cls, seed: int, length: int) -> "ShufflePlan":
        permutation = np.random.default_rng(seed).permutation(length)
        return cls(seed=seed, permutation=permutation)

    def inverted(self) -> "ShufflePlan":
        return ShufflePlan(seed=self.seed, permutation=np.argsort(self.permutation))


def shuffle(key: KeyString, plan: ShufflePlan) -> KeyString:
    """Reorder a key by a shuffle plan."""
    if len(plan.permutation) != len(key):
        raise ProtocolError(
            f"plan length {len(plan.permutation)} != key length {len(key)}"
        )
    return KeyString(bits=key.bits[plan.permutation], generation=key.generation)


def _split_blocks(alice: KeyString, bob: KeyString, n: int):
    if len(alice) != len(bob):
        raise ProtocolError(f"key lengths differ: {len(alice)} vs {len(bob)}")
    nblocks = len(alice) // n
    cut = nblocks * n
    a = alice.bits[:cut].reshape(nblocks, n)
    b = bob.bits[:cut].reshape(nblocks, n)
    return a, b, alice.bits[cut:], bob.bits[cut:]


def _block_syndromes(blocks: np.ndarray) -> np.ndarray:
    """Syndromes of the Hamming part (columns 1..N-1) of each block row."""
    positions = np.arange(1, blocks.shape[1], dtype=np.int64)
    return np.bitwise_xor.reduce(blocks[:, 1:].astype(np.int64) * positions, axis=1)


def winnow_pass(alice: KeyString, bob: KeyString, params: HammingParams,
                ledger: LeakLedger | None = None,
                transcript: Transcript | None = None,
                session_id: int = 0) -> tuple[KeyString, KeyString, LeakLedger]:
    """One Winnow pass over both keys.

    Keys are split into N-bit blocks (a trailing remainder shorter than N is
    carried through unchanged). The parity round discards block bit 0
    everywhere; blocks whose parities disagreed exchange syndromes, Bob
    flips the bit the syndrome difference names, and those blocks lose the
    m privacy-maintenance positions as well.
    """
    ledger = ledger if ledger is not None else LeakLedger()
    pass_index = ledger.next_pass_index
    n, m = params.n, params.m
    a, b, rem_a, rem_b = _split_blocks(alice, bob, n)
    nblocks = a.shape[0]

    par_a = a.sum(axis=1, dtype=np.int64) & 1
    par_b = b.sum(axis=1, dtype=np.int64) & 1
    mismatch = par_a != par_b
    rows = np.flatnonzero(mismatch)

    b = b.copy()
    if len(rows):
        syn_a = _block_syndromes(a[rows])
        syn_b = _block_syndromes(b[rows])
        s_d = syn_a ^ syn_b
        flip = np.flatnonzero(s_d)
        b[rows[flip], s_d[flip]] ^= 1

    if transcript is not None:
        transcript.append(WinnowMessage(session_id, pass_index, MessageKind.PARITY,
                                        nblocks, par_b.astype(np.uint8)))
        transcript.append(WinnowMessage(session_id, pass_index, MessageKind.PARITY_REPLY,
                                        nblocks, par_a.astype(np.uint8)))
        if len(rows):
            transcript.append(WinnowMessage(session_id, pass_index, MessageKind.SYNDROME,
                                            len(rows), _pack_syndromes(syn_a, m)))

    keep = np.ones((nblocks, n), dtype=bool)
    keep[:, 0] = False
    if len(rows):
        keep[np.ix_(rows, np.array(params.pm_positions))] = False

    new_alice = KeyString(np.concatenate([a[keep], rem_a]), alice.generation + 1)
    new_bob = KeyString(np.concatenate([b[keep], rem_b]), bob.generation + 1)

    messages = 0 if nblocks == 0 else (2 if len(rows) else 1)
    cost = nblocks + m * len(rows)
    ledger.add(PassLeak(pass_index=pass_index, block_size=n, blocks=nblocks,
                        mismatched_blocks=len(rows), bits_revealed=cost,
                        bits_discarded=cost, messages_sent=messages))
    return new_alice, new_bob, ledger


def _bisection_discards(n: int, supports: list[tuple[int, int]]) -> list[int]:
    """One discard position per revealed parity of a mismatched block.

    Supports are processed smallest first (the deepest bisection interval),
    taking the lowest untaken index inside each; the block-wide parity is
    paid for last. Support sizes double as the list proceeds, so a free
    index always exists.
    """
    taken: set[int] = set()
    for lo, hi in sorted(supports, key=lambda s: s[1] - s[0]) + [(0, n)]:
        for idx in range(lo, hi):
            if idx not in taken:
                taken.add(idx)
                break
        else:
            raise AssertionError("no free discard position in parity support")
    return sorted(taken)


def binary_pass(alice: KeyString, bob: KeyString, params: HammingParams,
                ledger: LeakLedger | None = None,
                privacy_maintenance: bool = True,
                transcript: Transcript | None = None,
                session_id: int = 0) -> tuple[KeyString, KeyString, LeakLedger]:
    """One BINARY pass: block parities, then bisection on mismatched blocks.

    Every mismatched block's single located error is flipped on Bob's side.
    With privacy maintenance, one bit is discarded per revealed parity (the
    discard positions are chosen deterministically inside each revealed
    parity's support); without it nothing is discarded and the revealed
    bits accrue in the ledger as super-redundant debt.
    """
    ledger = ledger if ledger is not None else LeakLedger()
    pass_index = ledger.next_pass_index
    n, levels = params.n, params.m
    a, b, rem_a, rem_b = _split_blocks(alice, bob, n)
    nblocks = a.shape[0]

    par_a = a.sum(axis=1, dtype=np.int64) & 1
    par_b = b.sum(axis=1, dtype=np.int64) & 1
    mismatch = par_a != par_b
    rows = np.flatnonzero(mismatch)
    k = len(rows)

    if transcript is not None:
        transcript.append(WinnowMessage(session_id, pass_index, MessageKind.PARITY,
                                        nblocks, par_b.astype(np.uint8)))
        transcript.append(WinnowMessage(session_id, pass_index, MessageKind.PARITY_REPLY,
                                        nblocks, par_a.astype(np.uint8)))

    b = b.copy()
    supports: list[list[tuple[int, int]]] = [[] for _ in range(k)]
    if k:
        zeros = np.zeros((k, 1), dtype=np.int64)
        pre_a = np.concatenate([zeros, np.cumsum(a[rows], axis=1, dtype=np.int64)], axis=1)
        pre_b = np.concatenate([zeros, np.cumsum(b[rows], axis=1, dtype=np.int64)], axis=1)
        idx = np.arange(k)
        lo = np.zeros(k, dtype=np.int64)
        hi = np.full(k, n, dtype=np.int64)
        for _ in range(levels):
            mid = (lo + hi) // 2
            half_a = (pre_a[idx, mid] - pre_a[idx, lo]) & 1
            half_b = (pre_b[idx, mid] - pre_b[idx, lo]) & 1
            for i in range(k):
                supports[i].append((int(lo[i]), int(mid[i])))
            if transcript is not None:
                transcript.append(WinnowMessage(session_id, pass_index,
                                                MessageKind.PARITY,
                                                k, half_b.astype(np.uint8)))
                transcript.append(WinnowMessage(session_id, pass_index,
                                                MessageKind.PARITY_REPLY,
                                                k, half_a.astype(np.uint8)))
            left_bad = half_a != half_b
            hi = np.where(left_bad, mid, hi)
            lo = np.where(left_bad, lo, mid)
        b[rows, lo] ^= 1

    keep = np.ones((nblocks, n), dtype=bool)
    discarded = 0
    if privacy_maintenance:
        keep[:, 0] = False
        for i, row in enumerate(rows):
            positions = _bisection_discards(n, supports[i])
            keep[row, :] = True
            keep[row, positions] = False
            # one of these positions pays for the block parity, which the
            # per-block tally below already counts
            discarded += len(positions) - 1
        discarded += nblocks

    new_alice = KeyString(np.concatenate([a[keep], rem_a]), alice.generation + 1)
    new_bob = KeyString(np.concatenate([b[keep], rem_b]), bob.generation + 1)

    messages = 0 if nblocks == 0 else (1 + levels if k else 1)
    revealed = nblocks + levels * k
    ledger.add(PassLeak(pass_index=pass_index, block_size=n, blocks=nblocks,
                        mismatched_blocks=k, bits_revealed=revealed,
                        bits_discarded=discarded, messages_sent=messages))
    return new_alice, new_bob, ledger


def communications_per_pass(protocol_kind: str, params: HammingParams,
                            any_mismatch: bool = True) -> int:
    """Message rounds one pass needs: Winnow uses 2 whenever any block
    mismatches (1 otherwise); BINARY needs 1 + log2(N)."""
    if protocol_kind == "winnow":
        return 2 if any_mismatch else 1
    if protocol_kind == "binary":
        return 1 + params.m if any_mismatch else 1
    raise ValueError(f"unknown protocol kind: {protocol_kind!r}")
