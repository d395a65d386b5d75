"""Fact bundles: build, sign, serialize, and parse.

A bundle packages one claim with everything needed to verify its provenance
offline: the Merkle root over the redundant constraint leaves, a query spec
for publicly replayable sampling, the source documents themselves (full
disclosure, so no network fetch is ever needed), every leaf with its
inclusion proof, and an Ed25519 signature over the canonical serialization
of (claim, root, query spec, metadata).

Wire layout (all integers big-endian, bit-exact and golden-tested):

    magic            4 bytes  b"FBDL"
    format version   u16      1
    hash algorithm   u8       0x01 = SHA-256
    sig algorithm    u8       0x01 = Ed25519
    signed region    u32 length, then:
        claim        canonical claim bytes (see provenance.claim_canonical_bytes)
        root         32 bytes
        query spec   universe u64, seed-rule string, beacon 32 bytes
        metadata     publisher string, timestamp i64, format version u16
    signature        u32 length + bytes
    sources          u64 count, each: id str, timestamp i64, origin str, content bytes
    leaf packages    u64 count, each: leaf bytes (u32 length) + inclusion proof

Source digests are not shipped; they are recomputed from content on parse,
so the wire format cannot assert a digest its content does not have.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from . import wire
from .commit import (
    InclusionProof,
    build_tree,
    proof_from_reader,
    proof_to_bytes,
    prove_inclusion,
)
from .encode import (
    EncodedConstraints,
    EncodingParams,
    Leaf,
    derive_constraints,
    encode_redundant,
    evaluate_leaf,
    leaf_bytes,
    leaf_from_bytes,
)
from .errors import (
    ConstraintViolationAtBuild,
    KTooLarge,
    MalformedBundle,
    SigningFailure,
)
from .hashing import DIGEST_SIZE, HashStream, digest_leaf
from .provenance import (
    Claim,
    ProvenanceDAG,
    SourceDoc,
    claim_canonical_bytes,
    dag_digest,
)

MAGIC = b"FBDL"
FORMAT_VERSION = 1
HASH_ALG_SHA256 = 0x01
SIG_ALG_ED25519 = 0x01

SEED_RULE_V1 = "sha256(root||beacon||entropy)/v1"
QUERY_LABEL = b"fb/query"
EMPTY_ROOT = b"\x00" * DIGEST_SIZE


@dataclass(frozen=True)
class KeyPair:
    """Ed25519 signing/verification keys for one publisher."""

    publisher_id: str
    signing_key: bytes
    verification_key: bytes

    @classmethod
    def generate(cls, publisher_id: str, seed: bytes | None = None) -> "KeyPair":
        secret = seed if seed is not None else os.urandom(32)
        if len(secret) != 32:
            raise ValueError("key seed must be 32 bytes")
        private = Ed25519PrivateKey.from_private_bytes(secret)
        return cls(
            publisher_id=publisher_id,
            signing_key=secret,
            verification_key=_raw_public_bytes(private.public_key()),
        )

    def __post_init__(self) -> None:
        derived = _raw_public_bytes(
            Ed25519PrivateKey.from_private_bytes(self.signing_key).public_key()
        )
        if derived != self.verification_key:
            raise ValueError("verification key does not match signing key")


def _raw_public_bytes(public: Ed25519PublicKey) -> bytes:
    from cryptography.hazmat.primitives.serialization import Encoding, PublicFormat

    return public.public_bytes(Encoding.Raw, PublicFormat.Raw)


def sign_payload(key: KeyPair, payload: bytes) -> bytes:
    try:
        return Ed25519PrivateKey.from_private_bytes(key.signing_key).sign(payload)
    except Exception as exc:  # pragma: no cover - library-level failure
        raise SigningFailure(str(exc)) from exc


def signature_valid(verification_key: bytes, signature: bytes, payload: bytes) -> bool:
    try:
        Ed25519PublicKey.from_public_bytes(verification_key).verify(signature, payload)
        return True
    except (InvalidSignature, ValueError):
        return False


@dataclass(frozen=True)
class QuerySpec:
    """Public description of how verify-time query indices are derived."""

    universe_size: int
    seed_rule: str
    beacon: bytes

    def __post_init__(self) -> None:
        if self.universe_size < 0:
            raise ValueError("universe size must be >= 0")
        if len(self.beacon) != DIGEST_SIZE:
            raise ValueError(f"beacon must be {DIGEST_SIZE} bytes")


@dataclass(frozen=True)
class BundleMeta:
    publisher_id: str
    timestamp: int
    format_version: int = FORMAT_VERSION


@dataclass(frozen=True)
class LeafPackage:
    leaf: Leaf
    proof: InclusionProof


@dataclass(frozen=True)
class Bundle:
    claim: Claim
    root: bytes
    query_spec: QuerySpec
    metadata: BundleMeta
    signature: bytes
    sources: tuple[SourceDoc, ...]
    leaf_packages: tuple[LeafPackage, ...]

    def node_view(self) -> dict[str, SourceDoc | Claim]:
        """Node lookup for leaf predicate evaluation, built from shipped data."""
        view: dict[str, SourceDoc | Claim] = {self.claim.id: self.claim}
        for doc in self.sources:
            view[doc.id] = doc
        return view


def signed_region_bytes(
    claim: Claim, root: bytes, query_spec: QuerySpec, metadata: BundleMeta
) -> bytes:
    """The exact bytes the signature covers."""
    out = [
        claim_canonical_bytes(claim),
        root,
        wire.pack_u64(query_spec.universe_size),
        wire.pack_str(query_spec.seed_rule),
        query_spec.beacon,
        wire.pack_str(metadata.publisher_id),
        wire.pack_i64(metadata.timestamp),
        wire.pack_u16(metadata.format_version),
    ]
    return b"".join(out)


def derive_query_seed(root: bytes, beacon: bytes, verifier_entropy: bytes) -> bytes:
    """Seed rule v1: SHA-256 over root || beacon || entropy."""
    if len(verifier_entropy) != DIGEST_SIZE:
        raise ValueError(f"verifier entropy must be {DIGEST_SIZE} bytes")
    return hashlib.sha256(root + beacon + verifier_entropy).digest()


def sample_queries(
    root: bytes,
    beacon: bytes,
    verifier_entropy: bytes,
    k: int,
    universe_size: int,
) -> list[int]:
    """k distinct uniform indices in [0, universe_size), publicly replayable.

    Deterministic given (root, beacon, entropy, k, universe): any third party
    with the same inputs reproduces the same index list, in the same order.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if universe_size < 1 or k > universe_size:
        raise KTooLarge(f"cannot draw {k} distinct indices from universe {universe_size}")
    seed = derive_query_seed(root, beacon, verifier_entropy)
    return HashStream(seed, label=QUERY_LABEL).sample_distinct(k, universe_size)


def build_bundle(
    dag: ProvenanceDAG,
    params: EncodingParams,
    key: KeyPair,
    beacon: bytes,
    metadata: BundleMeta | None = None,
    *,
    timestamp: int = 0,
) -> Bundle:
    """Assemble and sign a bundle for a provenance graph.

    Refuses to sign when any derived constraint fails against the graph's
    current data (ConstraintViolationAtBuild): an honest builder never ships
    a bundle its own spot-checks would reject. A claim-only graph produces a
    zero-leaf bundle whose verification rests on the signature alone.
    """
    if len(beacon) != DIGEST_SIZE:
        raise ValueError(f"beacon must be {DIGEST_SIZE} bytes")
    system = derive_constraints(dag)

    perm_seed = digest_leaf(b"fb/perm-seed" + dag_digest(dag) + beacon)
    encoded: EncodedConstraints = encode_redundant(system, params, perm_seed)
    for leaf in encoded.leaves:
        if not evaluate_leaf(leaf, dag):
            raise ConstraintViolationAtBuild(
                f"constraint {leaf.constraint.kind} on {leaf.constraint.subject_ids} "
                "does not hold against the builder's own data"
            )

    packages: tuple[LeafPackage, ...]
    if encoded.leaves:
        digests = [digest_leaf(leaf_bytes(leaf)) for leaf in encoded.leaves]
        tree = build_tree(digests)
        root = tree.root
        # Full disclosure: ship every leaf with its own inclusion proof,
        # in layout order, so verifiers can open any sampled index offline.
        packages = tuple(
            LeafPackage(leaf=leaf, proof=prove_inclusion(tree, i))
            for i, leaf in enumerate(encoded.leaves)
        )
    else:
        root = EMPTY_ROOT
        packages = ()

    meta = metadata or BundleMeta(publisher_id=key.publisher_id, timestamp=timestamp)
    query_spec = QuerySpec(
        universe_size=len(packages), seed_rule=SEED_RULE_V1, beacon=beacon
    )
    signature = sign_payload(key, signed_region_bytes(dag.claim, root, query_spec, meta))
    return Bundle(
        claim=dag.claim,
        root=root,
        query_spec=query_spec,
        metadata=meta,
        signature=signature,
        sources=dag.sources,
        leaf_packages=packages,
    )


def serialize_bundle(bundle: Bundle) -> bytes:
    """Canonical byte serialization; parse() inverts it bit-exactly."""
    header = (
        MAGIC
        + wire.pack_u16(FORMAT_VERSION)
        + wire.pack_u8(HASH_ALG_SHA256)
        + wire.pack_u8(SIG_ALG_ED25519)
    )
    signed = signed_region_bytes(
        bundle.claim, bundle.root, bundle.query_spec, bundle.metadata
    )
    out = [header, wire.pack_u32(len(signed)), signed, wire.pack_bytes(bundle.signature)]
    out.append(wire.pack_u64(len(bundle.sources)))
    for doc in bundle.sources:
        out.append(wire.pack_str(doc.id))
        out.append(wire.pack_i64(doc.timestamp))
        out.append(wire.pack_str(doc.origin))
        out.append(wire.pack_bytes(doc.content))
    out.append(wire.pack_u64(len(bundle.leaf_packages)))
    for package in bundle.leaf_packages:
        out.append(wire.pack_bytes(leaf_bytes(package.leaf)))
        out.append(proof_to_bytes(package.proof))
    return b"".join(out)


def signed_region_span(data: bytes) -> tuple[int, int]:
    """(start, end) byte offsets of the signed region within serialized bytes."""
    reader = wire.Reader(data)
    _read_header(reader)
    length = reader.u32()
    start = reader.position
    if start + length > len(data):
        raise MalformedBundle("signed region length exceeds file size")
    return start, start + length


def _read_header(reader: wire.Reader) -> None:
    if reader.take(4) != MAGIC:
        raise MalformedBundle("bad magic bytes")
    version = reader.u16()
    if version != FORMAT_VERSION:
        raise MalformedBundle(f"unsupported format version {version}")
    if reader.u8() != HASH_ALG_SHA256:
        raise MalformedBundle("unsupported hash algorithm id")
    if reader.u8() != SIG_ALG_ED25519:
        raise MalformedBundle("unsupported signature algorithm id")


def parse_bundle(data: bytes) -> Bundle:
    """Parse and structurally validate serialized bundle bytes.

    Raises MalformedBundle on truncation, bad framing, unknown identifiers,
    or any structural inconsistency (for example a leaf count that does not
    match the declared query universe). Signature and leaf integrity are not
    checked here; that is the verifier's job.
    """
    reader = wire.Reader(data)
    _read_header(reader)

    signed = reader.bytes_field()
    sr = wire.Reader(signed)
    try:
        claim = _read_claim(sr)
        root = sr.take(DIGEST_SIZE)
        universe = sr.u64()
        seed_rule = sr.str_field()
        beacon = sr.take(DIGEST_SIZE)
        publisher = sr.str_field()
        meta_ts = sr.i64()
        meta_version = sr.u16()
        sr.expect_end()
    except ValueError as exc:
        raise MalformedBundle(f"invalid signed region: {exc}") from exc
    if seed_rule != SEED_RULE_V1:
        raise MalformedBundle(f"unknown query seed rule {seed_rule!r}")
    if meta_version != FORMAT_VERSION:
        raise MalformedBundle("metadata format version mismatch")

    signature = reader.bytes_field()

    sources = []
    for _ in range(reader.u64()):
        sid = reader.str_field()
        ts = reader.i64()
        origin = reader.str_field()
        content = reader.bytes_field()
        try:
            sources.append(SourceDoc(id=sid, content=content, timestamp=ts, origin=origin))
        except ValueError as exc:
            raise MalformedBundle(f"invalid source record: {exc}") from exc

    packages = []
    for position in range(reader.u64()):
        raw_leaf = reader.bytes_field()
        proof = proof_from_reader(reader)
        if proof.leaf_index != position:
            raise MalformedBundle(
                f"leaf package {position} carries proof for index {proof.leaf_index}"
            )
        packages.append(LeafPackage(leaf=leaf_from_bytes(raw_leaf), proof=proof))
    reader.expect_end()

    if len(packages) != universe:
        raise MalformedBundle(
            f"query universe {universe} does not match {len(packages)} leaf packages"
        )

    return Bundle(
        claim=claim,
        root=root,
        query_spec=QuerySpec(universe_size=universe, seed_rule=seed_rule, beacon=beacon),
        metadata=BundleMeta(
            publisher_id=publisher, timestamp=meta_ts, format_version=meta_version
        ),
        signature=signature,
        sources=tuple(sources),
        leaf_packages=tuple(packages),
    )


def _read_claim(reader: wire.Reader) -> Claim:
    claim_id = reader.str_field()
    has_ts = reader.u8()
    if has_ts not in (0, 1):
        raise MalformedBundle("bad claim timestamp flag")
    timestamp = reader.i64() if has_ts else None
    text = reader.str_field()
    pairs = tuple((reader.str_field(), reader.str_field()) for _ in range(reader.u32()))
    return Claim(id=claim_id, text=text, asserted_values=pairs, timestamp=timestamp)


# --- key registry (publisher id -> verification key) ---

def registry_to_json(keys: dict[str, bytes]) -> str:
    import json

    return json.dumps(
        {pid: vk.hex() for pid, vk in sorted(keys.items())}, indent=2, sort_keys=True
    ) + "\n"


def registry_from_json(text: str) -> dict[str, bytes]:
    import json

    raw = json.loads(text)
    if not isinstance(raw, dict):
        raise ValueError("key registry must be a JSON object")
    return {str(pid): bytes.fromhex(vk) for pid, vk in raw.items()}
