"""Merkle commitment over encoded leaves, with logarithmic inclusion proofs.

Tree shape: level 0 holds the leaf digests in order; each parent is
SHA-256(0x01 || left || right); an unpaired node at the end of an odd level
is promoted to the next level unchanged (no duplication, which avoids the
duplicate-leaf malleability of the bitcoin-style tree). A single-leaf tree's
root is the leaf digest itself.

Proof wire encoding (bit-exact, golden-tested):

    leaf index   u64 big-endian
    path count   u32 big-endian
    path entry   1 side byte (0x00 sibling-left, 0x01 sibling-right) + 32 hash bytes
"""

from __future__ import annotations

from dataclasses import dataclass

from . import wire
from .errors import EmptyLeafSet, IndexOutOfRange, MalformedBundle
from .hashing import DIGEST_SIZE, digest_node

SIBLING_LEFT = 0
SIBLING_RIGHT = 1


@dataclass(frozen=True)
class InclusionProof:
    leaf_index: int
    # (sibling digest, side) from the leaf level upward; levels where the
    # node is promoted without a sibling contribute no entry.
    path: tuple[tuple[bytes, int], ...]


@dataclass(frozen=True)
class MerkleTree:
    leaf_digests: tuple[bytes, ...]
    levels: tuple[tuple[bytes, ...], ...]

    @property
    def root(self) -> bytes:
        return self.levels[-1][0]

    def __len__(self) -> int:
        return len(self.leaf_digests)


def build_tree(leaf_digests: list[bytes] | tuple[bytes, ...]) -> MerkleTree:
    """Build the full tree bottom-up. Requires at least one leaf."""
    if not leaf_digests:
        raise EmptyLeafSet("cannot commit to zero leaves")
    for digest in leaf_digests:
        if len(digest) != DIGEST_SIZE:
            raise ValueError(f"leaf digest must be {DIGEST_SIZE} bytes")
    levels = [tuple(leaf_digests)]
    while len(levels[-1]) > 1:
        current = levels[-1]
        parents = []
        for i in range(0, len(current) - 1, 2):
            parents.append(digest_node(current[i], current[i + 1]))
        if len(current) % 2 == 1:
            parents.append(current[-1])
        levels.append(tuple(parents))
    return MerkleTree(leaf_digests=tuple(leaf_digests), levels=tuple(levels))


def prove_inclusion(tree: MerkleTree, index: int) -> InclusionProof:
    """Sibling path for the leaf at `index`."""
    if not 0 <= index < len(tree.leaf_digests):
        raise IndexOutOfRange(f"leaf index {index} not in [0, {len(tree.leaf_digests)})")
    path: list[tuple[bytes, int]] = []
    idx = index
    for level in tree.levels[:-1]:
        sibling = idx ^ 1
        if sibling < len(level):
            side = SIBLING_LEFT if sibling < idx else SIBLING_RIGHT
            path.append((level[sibling], side))
        # Unpaired nodes promote unchanged; the parent index is idx // 2
        # either way because the promoted node's level index is even.
        idx //= 2
    return InclusionProof(leaf_index=index, path=tuple(path))


def verify_inclusion(root: bytes, leaf_digest: bytes, proof: InclusionProof) -> bool:
    """True iff the path recomputes to the root. Malformed proofs verify false."""
    if len(root) != DIGEST_SIZE or len(leaf_digest) != DIGEST_SIZE:
        return False
    node = leaf_digest
    for sibling, side in proof.path:
        if len(sibling) != DIGEST_SIZE or side not in (SIBLING_LEFT, SIBLING_RIGHT):
            return False
        if side == SIBLING_LEFT:
            node = digest_node(sibling, node)
        else:
            node = digest_node(node, sibling)
    return node == root


def proof_to_bytes(proof: InclusionProof) -> bytes:
    out = [wire.pack_u64(proof.leaf_index), wire.pack_u32(len(proof.path))]
    for sibling, side in proof.path:
        out.append(wire.pack_u8(side))
        out.append(sibling)
    return b"".join(out)


def proof_from_reader(reader: wire.Reader) -> InclusionProof:
    leaf_index = reader.u64()
    count = reader.u32()
    path = []
    for _ in range(count):
        side = reader.u8()
        if side not in (SIBLING_LEFT, SIBLING_RIGHT):
            raise MalformedBundle(f"bad proof side byte {side:#x}")
        path.append((reader.take(DIGEST_SIZE), side))
    return InclusionProof(leaf_index=leaf_index, path=tuple(path))


def proof_from_bytes(data: bytes) -> InclusionProof:
    reader = wire.Reader(data)
    proof = proof_from_reader(reader)
    reader.expect_end()
    return proof
