"""Coherency constraints over a provenance graph and their redundant leaf layout.

Three constraint kinds are derived from a graph:

- derivation-consistency, one per derivation edge: pins the content digests
  of both endpoints as recorded at build time.
- citation-presence, one per citation edge: pins the digest of the cited
  (from) node, so the citation target must exist and be unmodified.
- timestamp-order, one per derivation edge whose endpoints both carry
  timestamps: pins both timestamps and requires from <= to.

The redundant layout replicates each constraint r times and lays the copies
out under a seeded pseudorandom permutation (counter-mode SHA-256 PRF feeding
Fisher-Yates with rejection-sampled index draws). Distance is measured at
constraint granularity: an assignment violating a fraction eta of constraints
violates exactly that fraction of leaves, i.e. the detection-gap factor of
this encoding is exactly 1. That constant is carried explicitly in
EncodingParams rather than assumed by callers, and the encoding is swappable
behind this module without touching the verifier arithmetic.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Mapping

from . import wire
from .errors import MalformedBundle, UnresolvableSubject
from .hashing import HashStream
from .provenance import (
    CITATION,
    DERIVATION,
    Claim,
    ProvenanceDAG,
    SourceDoc,
    dag_digest,
    node_digest,
)

DERIVATION_CONSISTENCY = "derivation-consistency"
CITATION_PRESENCE = "citation-presence"
TIMESTAMP_ORDER = "timestamp-order"

# Wire ids double as the canonical sort order of constraint kinds.
KIND_IDS = {
    DERIVATION_CONSISTENCY: 1,
    CITATION_PRESENCE: 2,
    TIMESTAMP_ORDER: 3,
}
KIND_NAMES = {v: k for k, v in KIND_IDS.items()}

PERMUTATION_LABEL = b"fb/perm"


@dataclass(frozen=True)
class Constraint:
    """One coherency predicate: a kind, the node ids it binds, and the
    canonical bytes of the expected relation."""

    kind: str
    subject_ids: tuple[str, ...]
    payload: bytes

    def __post_init__(self) -> None:
        if self.kind not in KIND_IDS:
            raise ValueError(f"unknown constraint kind {self.kind!r}")
        if not self.payload:
            raise ValueError("constraint payload must be non-empty")
        object.__setattr__(self, "subject_ids", tuple(self.subject_ids))

    def sort_key(self) -> tuple[int, tuple[str, ...]]:
        return (KIND_IDS[self.kind], self.subject_ids)


@dataclass(frozen=True)
class ConstraintSystem:
    constraints: tuple[Constraint, ...]
    source_dag_digest: bytes

    def __len__(self) -> int:
        return len(self.constraints)


@dataclass(frozen=True)
class EncodingParams:
    """Replication factor and the soundness-bound parameters quoted with it.

    gamma is the fraction-of-violated-leaves-per-unit-distance constant of
    the encoding; replication fixes it to 1. eta_min is the smallest tamper
    fraction the quoted miss bound (1 - gamma*eta)^k is stated against.
    """

    replication: int = 1
    gamma: float = 1.0
    eta_min: float = 0.5

    def __post_init__(self) -> None:
        if not isinstance(self.replication, int) or self.replication < 1:
            raise ValueError("replication must be an integer >= 1")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must be in (0, 1]")
        if not 0 < self.eta_min <= 1:
            raise ValueError("eta_min must be in (0, 1]")


@dataclass(frozen=True)
class Leaf:
    """One replica of one constraint, as committed to the Merkle tree."""

    constraint: Constraint
    replica: int


@dataclass(frozen=True)
class EncodedConstraints:
    leaves: tuple[Leaf, ...]
    params: EncodingParams
    permutation_seed: bytes


def derive_constraints(dag: ProvenanceDAG) -> ConstraintSystem:
    """Derive the full constraint list for a graph, canonically ordered.

    A degenerate claim-only graph yields an empty system.
    """
    constraints: list[Constraint] = []
    for edge in dag.edges:
        from_node = dag.node_map[edge.from_id]
        to_node = dag.node_map[edge.to_id]
        if edge.kind == DERIVATION:
            constraints.append(
                Constraint(
                    kind=DERIVATION_CONSISTENCY,
                    subject_ids=(edge.from_id, edge.to_id),
                    payload=_recorded_digest(from_node) + _recorded_digest(to_node),
                )
            )
            from_ts = from_node.timestamp
            to_ts = to_node.timestamp
            if from_ts is not None and to_ts is not None:
                constraints.append(
                    Constraint(
                        kind=TIMESTAMP_ORDER,
                        subject_ids=(edge.from_id, edge.to_id),
                        payload=struct.pack(">qq", from_ts, to_ts),
                    )
                )
        elif edge.kind == CITATION:
            constraints.append(
                Constraint(
                    kind=CITATION_PRESENCE,
                    subject_ids=(edge.from_id, edge.to_id),
                    payload=_recorded_digest(from_node),
                )
            )
    constraints.sort(key=Constraint.sort_key)
    return ConstraintSystem(constraints=tuple(constraints), source_dag_digest=dag_digest(dag))


def _recorded_digest(node: SourceDoc | Claim) -> bytes:
    # Sources contribute the digest recorded at construction (which may be
    # stale if content was mutated afterwards; the builder checks). The claim
    # has no recorded field, so its digest is always freshly computed.
    if isinstance(node, SourceDoc):
        return node.digest
    return node_digest(node)


def encode_redundant(
    system: ConstraintSystem, params: EncodingParams, seed: bytes
) -> EncodedConstraints:
    """Lay out r copies of every constraint under a seeded permutation.

    Deterministic given (system, params, seed). An empty system encodes to
    zero leaves.
    """
    base = [
        Leaf(constraint=c, replica=rep)
        for c in system.constraints
        for rep in range(params.replication)
    ]
    stream = HashStream(seed, label=PERMUTATION_LABEL)
    stream.shuffle(base)
    return EncodedConstraints(leaves=tuple(base), params=params, permutation_seed=seed)


def leaf_bytes(leaf: Leaf) -> bytes:
    """Canonical byte encoding of a leaf (hashed into the Merkle tree)."""
    c = leaf.constraint
    out = [wire.pack_u8(KIND_IDS[c.kind]), wire.pack_u32(len(c.subject_ids))]
    for subject in c.subject_ids:
        out.append(wire.pack_str(subject))
    out.append(wire.pack_bytes(c.payload))
    out.append(wire.pack_u32(leaf.replica))
    return b"".join(out)


def leaf_from_bytes(data: bytes) -> Leaf:
    """Inverse of leaf_bytes; raises MalformedBundle on bad framing."""
    reader = wire.Reader(data)
    kind_id = reader.u8()
    if kind_id not in KIND_NAMES:
        raise MalformedBundle(f"unknown constraint kind id {kind_id}")
    subjects = tuple(reader.str_field() for _ in range(reader.u32()))
    payload = reader.bytes_field()
    replica = reader.u32()
    reader.expect_end()
    return Leaf(constraint=Constraint(KIND_NAMES[kind_id], subjects, payload), replica=replica)


def evaluate_leaf(leaf: Leaf, nodes: ProvenanceDAG | Mapping[str, SourceDoc | Claim]) -> bool:
    """Evaluate one leaf's predicate against current node data.

    `nodes` is either a full graph or any mapping of node id to node (a
    bundle reconstructs such a view from its shipped claim and sources).
    Raises UnresolvableSubject when a referenced id is absent, which during
    verification signals a malformed or tampered bundle.
    """
    node_map = nodes.node_map if isinstance(nodes, ProvenanceDAG) else nodes
    c = leaf.constraint
    resolved = []
    for subject in c.subject_ids:
        node = node_map.get(subject)
        if node is None:
            raise UnresolvableSubject(f"constraint subject {subject!r} not present")
        resolved.append(node)

    if c.kind == DERIVATION_CONSISTENCY:
        if len(resolved) != 2 or len(c.payload) != 64:
            return False
        return (
            node_digest(resolved[0]) == c.payload[:32]
            and node_digest(resolved[1]) == c.payload[32:]
        )
    if c.kind == CITATION_PRESENCE:
        if len(resolved) != 2 or len(c.payload) != 32:
            return False
        return node_digest(resolved[0]) == c.payload
    # timestamp-order
    if len(resolved) != 2 or len(c.payload) != 16:
        return False
    recorded_from, recorded_to = struct.unpack(">qq", c.payload)
    return (
        resolved[0].timestamp == recorded_from
        and resolved[1].timestamp == recorded_to
        and recorded_from <= recorded_to
    )
