"""Hash primitives: domain-separated SHA-256 and a deterministic PRF stream.

Domain separation uses a single prefix byte: 0x00 for leaf/content digests,
0x01 for internal Merkle nodes. Mixing the two domains would allow an
internal node to be replayed as a leaf (a classic second-preimage trick),
so every digest in the toolkit goes through one of the two helpers below.

HashStream turns a 32-byte seed into an unbounded byte stream by hashing
(label || seed || counter) blocks. Integer draws use rejection sampling on
masked bits, never a modulo reduction, so they are exactly uniform.
"""

from __future__ import annotations

import hashlib

DIGEST_SIZE = 32

LEAF_PREFIX = b"\x00"
NODE_PREFIX = b"\x01"


def digest_leaf(content: bytes) -> bytes:
    """SHA-256 over the leaf domain: prefix byte 0x00 then the raw content."""
    return hashlib.sha256(LEAF_PREFIX + content).digest()


def digest_node(left: bytes, right: bytes) -> bytes:
    """SHA-256 over the internal-node domain: 0x01 then the two child hashes."""
    return hashlib.sha256(NODE_PREFIX + left + right).digest()


class HashStream:
    """Deterministic byte stream and unbiased integer sampler.

    Block i of the stream is SHA-256(label || seed || i) with i as an 8-byte
    big-endian counter. The same (label, seed) always yields the same stream,
    which is what makes permutations and query sampling publicly replayable.
    """

    def __init__(self, seed: bytes, label: bytes = b"") -> None:
        if len(seed) != DIGEST_SIZE:
            raise ValueError(f"seed must be {DIGEST_SIZE} bytes, got {len(seed)}")
        self._prefix = label + seed
        self._counter = 0
        self._buffer = b""

    def take(self, n: int) -> bytes:
        """Return the next n bytes of the stream."""
        while len(self._buffer) < n:
            block = hashlib.sha256(
                self._prefix + self._counter.to_bytes(8, "big")
            ).digest()
            self._counter += 1
            self._buffer += block
        out, self._buffer = self._buffer[:n], self._buffer[n:]
        return out

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound) via rejection sampling (no modulo bias)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        if bound == 1:
            return 0
        nbits = (bound - 1).bit_length()
        nbytes = (nbits + 7) // 8
        mask = (1 << nbits) - 1
        while True:
            value = int.from_bytes(self.take(nbytes), "big") & mask
            if value < bound:
                return value

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle driven by this stream."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_distinct(self, k: int, universe: int) -> list[int]:
        """k distinct uniform indices from [0, universe), in draw order.

        Duplicates are rejected and redrawn, so the result is a uniform
        ordered sample without replacement.
        """
        if k > universe:
            raise ValueError("cannot draw more distinct indices than the universe holds")
        seen: set[int] = set()
        out: list[int] = []
        while len(out) < k:
            idx = self.randbelow(universe)
            if idx not in seen:
                seen.add(idx)
                out.append(idx)
        return out
