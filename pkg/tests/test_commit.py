"""Merkle tree construction, inclusion proofs, and the proof wire format."""

import hashlib
import math
import random

import pytest

from factbundle import build_tree, prove_inclusion, verify_inclusion
from factbundle.commit import (
    InclusionProof,
    proof_from_bytes,
    proof_to_bytes,
)
from factbundle.errors import EmptyLeafSet, IndexOutOfRange, MalformedBundle
from factbundle.hashing import digest_leaf, digest_node


def _leaves(n, tag=b""):
    return [digest_leaf(tag + i.to_bytes(4, "big")) for i in range(n)]


def test_domain_separation_prefixes():
    # leaf and node hashing are sha256 with distinct one-byte prefixes
    assert digest_leaf(b"") == hashlib.sha256(b"\x00").digest()
    assert (
        digest_leaf(b"").hex()
        == "6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa01d"
    )
    left, right = digest_leaf(b"L"), digest_leaf(b"R")
    assert digest_node(left, right) == hashlib.sha256(b"\x01" + left + right).digest()
    # a leaf over the concatenation can never collide with an interior node
    assert digest_leaf(left + right) != digest_node(left, right)


def test_single_leaf_root_is_the_leaf():
    leaf = digest_leaf(b"only")
    tree = build_tree([leaf])
    assert tree.root == leaf
    proof = prove_inclusion(tree, 0)
    assert proof.path == ()
    assert verify_inclusion(tree.root, leaf, proof)


def test_two_leaf_root_computed_by_hand():
    l0, l1 = _leaves(2)
    assert build_tree([l0, l1]).root == digest_node(l0, l1)


def test_odd_leaf_promotion_no_duplication():
    """With three leaves the unpaired one is promoted unchanged, not doubled."""
    l0, l1, l2 = _leaves(3)
    assert build_tree([l0, l1, l2]).root == digest_node(digest_node(l0, l1), l2)
    # five leaves: ((01)(23))(4)
    l0, l1, l2, l3, l4 = _leaves(5)
    expected = digest_node(
        digest_node(digest_node(l0, l1), digest_node(l2, l3)), l4
    )
    assert build_tree(_leaves(5)).root == expected


def test_empty_leaf_set_rejected():
    with pytest.raises(EmptyLeafSet):
        build_tree([])


def test_leaf_digest_length_checked():
    with pytest.raises(ValueError):
        build_tree([b"short"])


def test_round_trip_random_sizes_and_indices():
    rng = random.Random(0x3E91)
    for _ in range(40):
        n = rng.randrange(1, 200)
        leaves = _leaves(n, tag=rng.randbytes(4))
        tree = build_tree(leaves)
        for index in rng.sample(range(n), min(n, 8)):
            proof = prove_inclusion(tree, index)
            assert proof.leaf_index == index
            assert len(proof.path) <= math.ceil(math.log2(n)) if n > 1 else proof.path == ()
            assert verify_inclusion(tree.root, leaves[index], proof)


def test_wrong_leaf_or_wrong_proof_fails():
    leaves = _leaves(10)
    tree = build_tree(leaves)
    proof = prove_inclusion(tree, 3)
    assert not verify_inclusion(tree.root, leaves[4], proof)
    assert not verify_inclusion(tree.root, digest_leaf(b"absent"), proof)
    # truncated and extended paths both fail
    shorter = InclusionProof(leaf_index=3, path=proof.path[:-1])
    assert not verify_inclusion(tree.root, leaves[3], shorter)
    longer = InclusionProof(leaf_index=3, path=proof.path + ((digest_leaf(b"x"), 0),))
    assert not verify_inclusion(tree.root, leaves[3], longer)
    # flipping a sibling side breaks the path
    (first_sibling, side), *rest = proof.path
    flipped = InclusionProof(leaf_index=3, path=((first_sibling, 1 - side), *rest))
    assert not verify_inclusion(tree.root, leaves[3], flipped)


def test_prove_inclusion_bounds_checked():
    tree = build_tree(_leaves(4))
    with pytest.raises(IndexOutOfRange):
        prove_inclusion(tree, 4)
    with pytest.raises(IndexOutOfRange):
        prove_inclusion(tree, -1)


def test_proof_wire_round_trip():
    rng = random.Random(5150)
    for _ in range(30):
        n = rng.randrange(1, 100)
        tree = build_tree(_leaves(n, tag=rng.randbytes(2)))
        proof = prove_inclusion(tree, rng.randrange(n))
        assert proof_from_bytes(proof_to_bytes(proof)) == proof


def test_proof_wire_rejects_bad_bytes():
    tree = build_tree(_leaves(8))
    raw = proof_to_bytes(prove_inclusion(tree, 2))
    with pytest.raises(MalformedBundle):
        proof_from_bytes(raw[:-1])
    with pytest.raises(MalformedBundle):
        proof_from_bytes(raw + b"\x00")
    # corrupt a side byte (first path entry) to an invalid value
    mangled = bytearray(raw)
    mangled[12] = 7  # side byte of the first path entry
    with pytest.raises(MalformedBundle):
        proof_from_bytes(bytes(mangled))


def test_any_leaf_change_changes_root_small():
    leaves = _leaves(16)
    root = build_tree(leaves).root
    for index in range(16):
        mutated = list(leaves)
        mutated[index] = digest_leaf(b"mut" + index.to_bytes(2, "big"))
        assert build_tree(mutated).root != root
