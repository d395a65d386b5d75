"""Deterministic bundle mutation for soundness experiments.

Three modes, all operating on serialized bundle bytes and returning new
bytes without re-signing anything:

* leaf-fraction: rewrite a chosen fraction of leaf payloads (XOR a fixed
  mask). The root, proofs, and signature are left untouched, so the
  signature stays valid while the mutated leaves' inclusion proofs go stale
  — exactly the adversary the spot-check game is about.
* signature-byte: flip one signature byte; verification must reject before
  any spot-check runs.
* metadata: bump the signed metadata timestamp without re-signing, so the
  signature no longer covers the bytes presented.
"""

from __future__ import annotations

import random
from dataclasses import replace

from .bundle import Bundle, BundleMeta, LeafPackage, parse_bundle, serialize_bundle
from .encode import Constraint, Leaf
from .errors import InvalidParams

MODE_LEAF_FRACTION = "leaf-fraction"
MODE_SIGNATURE_BYTE = "signature-byte"
MODE_METADATA = "metadata"
MODES = (MODE_LEAF_FRACTION, MODE_SIGNATURE_BYTE, MODE_METADATA)

_PAYLOAD_MASK = 0xA5


def _mutated_leaf(leaf: Leaf) -> Leaf:
    payload = bytes(b ^ _PAYLOAD_MASK for b in leaf.constraint.payload)
    constraint = Constraint(
        kind=leaf.constraint.kind,
        subject_ids=leaf.constraint.subject_ids,
        payload=payload,
    )
    return Leaf(constraint=constraint, replica=leaf.replica)


def tamper_bundle(data: bytes, mode: str, amount: float = 1.0, seed: int = 0) -> bytes:
    """Mutate serialized bundle bytes; deterministic given the seed.

    amount is only meaningful for leaf-fraction mode: the fraction of leaves
    to rewrite, rounded half-up to a leaf count, selected uniformly without
    replacement. Raises MalformedBundle if the input is not a valid bundle.
    """
    if mode not in MODES:
        raise InvalidParams(f"unknown tamper mode {mode!r}; pick one of {MODES}")
    bundle = parse_bundle(data)

    if mode == MODE_LEAF_FRACTION:
        if not 0.0 <= amount <= 1.0:
            raise InvalidParams("leaf fraction must be in [0, 1]")
        total = len(bundle.leaf_packages)
        count = int(amount * total + 0.5)
        if count == 0:
            return serialize_bundle(bundle)
        chosen = set(random.Random(seed).sample(range(total), count))
        packages = tuple(
            LeafPackage(leaf=_mutated_leaf(pkg.leaf), proof=pkg.proof)
            if i in chosen
            else pkg
            for i, pkg in enumerate(bundle.leaf_packages)
        )
        return serialize_bundle(replace(bundle, leaf_packages=packages))

    if mode == MODE_SIGNATURE_BYTE:
        position = random.Random(seed).randrange(len(bundle.signature))
        signature = bytearray(bundle.signature)
        signature[position] ^= 0xFF
        return serialize_bundle(replace(bundle, signature=bytes(signature)))

    # metadata mode: shift the signed timestamp without re-signing
    meta = bundle.metadata
    mutated = BundleMeta(
        publisher_id=meta.publisher_id,
        timestamp=meta.timestamp + 1,
        format_version=meta.format_version,
    )
    return serialize_bundle(replace(bundle, metadata=mutated))


def tampered_bundle(bundle: Bundle, mode: str, amount: float = 1.0, seed: int = 0) -> Bundle:
    """Same mutation, object-to-object (convenience for in-process tests)."""
    return parse_bundle(tamper_bundle(serialize_bundle(bundle), mode, amount, seed))
