"""Provenance graphs: a claim, its source documents, and the edges between them.

A graph is a DAG whose nodes are one claim plus any number of source
documents. Edges are (from-id, to-id, kind) with kind either "derivation"
(content of the from-node feeds the to-node) or "citation" (the from-node is
cited by the to-node). Construction canonicalizes ordering (nodes and edges
sorted by id) so every downstream encoding is deterministic.

The module also defines the line-oriented interchange format used by the CLI:

    fbdag 1
    claim\t<id>\t<ts|->\t<b64 text>\t<n>\t<b64 key>\t<b64 value>...
    source\t<id>\t<ts>\t<b64 origin>\t<b64 content>
    edge\t<from>\t<to>\t<derivation|citation>

One record per line, tab-separated, node records before edge records, free
text and byte fields base64-encoded. Serializing a canonical graph and
re-parsing it reproduces the exact same bytes.
"""

from __future__ import annotations

import base64
from dataclasses import dataclass, field

from . import wire
from .errors import CycleDetected, DanglingEdge, DuplicateId
from .hashing import DIGEST_SIZE, digest_leaf

DAG_FORMAT_HEADER = "fbdag 1"

DERIVATION = "derivation"
CITATION = "citation"
EDGE_KINDS = (DERIVATION, CITATION)

_FORBIDDEN_ID_CHARS = ("\t", "\n", "\r")


def digest_source(content: bytes) -> bytes:
    """Content digest of a source document.

    Deterministic SHA-256 over the leaf domain (prefix byte 0x00 then the
    content), so a source digest can double as a Merkle leaf digest without
    crossing hash domains.
    """
    return digest_leaf(content)


def _check_id(node_id: str) -> None:
    if not node_id:
        raise ValueError("node id must be non-empty")
    if any(ch in node_id for ch in _FORBIDDEN_ID_CHARS):
        raise ValueError(f"node id contains forbidden control character: {node_id!r}")


@dataclass(frozen=True)
class SourceDoc:
    """A source document with recorded content digest.

    The digest is computed from the content at construction time unless an
    explicit value is supplied. A mismatching explicit digest models content
    that was mutated after digesting; the bundle builder refuses to sign
    such a document.
    """

    id: str
    content: bytes
    timestamp: int
    origin: str
    digest: bytes = b""

    def __post_init__(self) -> None:
        _check_id(self.id)
        if not isinstance(self.timestamp, int):
            raise ValueError("timestamp must be an integer (seconds since epoch)")
        if not self.digest:
            object.__setattr__(self, "digest", digest_source(self.content))
        elif len(self.digest) != DIGEST_SIZE:
            raise ValueError(f"digest must be {DIGEST_SIZE} bytes")


@dataclass(frozen=True)
class Claim:
    """The claim a provenance graph supports.

    asserted_values are (key, value) pairs extracted from the claim text for
    constraint checking; their order is significant and preserved. The
    timestamp is optional: when present it participates in timestamp-order
    constraints exactly like a source timestamp.
    """

    id: str
    text: str
    asserted_values: tuple[tuple[str, str], ...] = ()
    timestamp: int | None = None

    def __post_init__(self) -> None:
        _check_id(self.id)
        if not self.text:
            raise ValueError("claim text must be non-empty")
        object.__setattr__(
            self, "asserted_values", tuple((str(k), str(v)) for k, v in self.asserted_values)
        )


@dataclass(frozen=True)
class Edge:
    from_id: str
    to_id: str
    kind: str

    def __post_init__(self) -> None:
        if self.kind not in EDGE_KINDS:
            raise ValueError(f"edge kind must be one of {EDGE_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class ProvenanceDAG:
    """Validated, canonically ordered provenance graph. Build via build_dag()."""

    claim: Claim
    sources: tuple[SourceDoc, ...]
    edges: tuple[Edge, ...]
    node_map: dict[str, SourceDoc | Claim] = field(repr=False, compare=False, default_factory=dict)

    def node_timestamp(self, node_id: str) -> int | None:
        node = self.node_map[node_id]
        return node.timestamp


def claim_canonical_bytes(claim: Claim) -> bytes:
    """Canonical byte encoding of a claim (also the bundle wire encoding)."""
    out = [wire.pack_str(claim.id)]
    if claim.timestamp is None:
        out.append(wire.pack_u8(0))
    else:
        out.append(wire.pack_u8(1))
        out.append(wire.pack_i64(claim.timestamp))
    out.append(wire.pack_str(claim.text))
    out.append(wire.pack_u32(len(claim.asserted_values)))
    for key, value in claim.asserted_values:
        out.append(wire.pack_str(key))
        out.append(wire.pack_str(value))
    return b"".join(out)


def node_digest(node: SourceDoc | Claim) -> bytes:
    """Recomputed content digest of a node.

    Sources digest their raw content; the claim digests its canonical byte
    encoding. Always recomputed from current data, never read from the
    recorded digest field, so stale records are detectable.
    """
    if isinstance(node, SourceDoc):
        return digest_source(node.content)
    return digest_source(claim_canonical_bytes(node))


def _toposort(node_ids: list[str], edges: tuple[Edge, ...]) -> list[str]:
    """Kahn's algorithm; raises CycleDetected if no topological order exists."""
    indegree = {nid: 0 for nid in node_ids}
    successors: dict[str, list[str]] = {nid: [] for nid in node_ids}
    for edge in edges:
        indegree[edge.to_id] += 1
        successors[edge.from_id].append(edge.to_id)
    ready = sorted(nid for nid, deg in indegree.items() if deg == 0)
    order: list[str] = []
    while ready:
        nid = ready.pop()
        order.append(nid)
        for succ in successors[nid]:
            indegree[succ] -= 1
            if indegree[succ] == 0:
                ready.append(succ)
    if len(order) != len(node_ids):
        stuck = sorted(nid for nid, deg in indegree.items() if deg > 0)
        raise CycleDetected(f"edge set induces a cycle among nodes {stuck}")
    return order


def build_dag(
    claim: Claim,
    sources: list[SourceDoc] | tuple[SourceDoc, ...],
    edges: list[tuple[str, str, str] | Edge] | tuple[tuple[str, str, str] | Edge, ...] = (),
) -> ProvenanceDAG:
    """Validate and canonicalize a provenance graph.

    Sources are sorted by id, edges by (from, to, kind), and exact duplicate
    edges collapse to one (a repeated edge adds no information, and keeping
    the edge set duplicate-free keeps the derived constraint list
    duplicate-free). A bare claim with no sources or edges is a valid
    degenerate graph.

    Raises DuplicateId, DanglingEdge, or CycleDetected on invalid input.
    """
    ids: set[str] = {claim.id}
    for doc in sources:
        if doc.id in ids:
            raise DuplicateId(f"node id {doc.id!r} appears more than once")
        ids.add(doc.id)

    normalized: set[Edge] = set()
    for item in edges:
        edge = item if isinstance(item, Edge) else Edge(*item)
        if edge.from_id not in ids:
            raise DanglingEdge(f"edge references unknown node id {edge.from_id!r}")
        if edge.to_id not in ids:
            raise DanglingEdge(f"edge references unknown node id {edge.to_id!r}")
        if edge.from_id == edge.to_id:
            raise CycleDetected(f"self-edge on node {edge.from_id!r}")
        normalized.add(edge)

    sorted_sources = tuple(sorted(sources, key=lambda d: d.id))
    sorted_edges = tuple(sorted(normalized, key=lambda e: (e.from_id, e.to_id, e.kind)))
    _toposort(sorted(ids), sorted_edges)

    node_map: dict[str, SourceDoc | Claim] = {claim.id: claim}
    for doc in sorted_sources:
        node_map[doc.id] = doc
    return ProvenanceDAG(claim=claim, sources=sorted_sources, edges=sorted_edges, node_map=node_map)


# --- canonical text interchange format ---

def _b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def _unb64(text: str) -> bytes:
    return base64.b64decode(text.encode("ascii"), validate=True)


def dumps(dag: ProvenanceDAG) -> str:
    """Serialize a canonical graph to the line-oriented interchange format."""
    lines = [DAG_FORMAT_HEADER]
    c = dag.claim
    claim_fields = [
        "claim",
        c.id,
        "-" if c.timestamp is None else str(c.timestamp),
        _b64(c.text.encode("utf-8")),
        str(len(c.asserted_values)),
    ]
    for key, value in c.asserted_values:
        claim_fields.append(_b64(key.encode("utf-8")))
        claim_fields.append(_b64(value.encode("utf-8")))
    lines.append("\t".join(claim_fields))
    for doc in dag.sources:
        lines.append(
            "\t".join(
                [
                    "source",
                    doc.id,
                    str(doc.timestamp),
                    _b64(doc.origin.encode("utf-8")),
                    _b64(doc.content),
                ]
            )
        )
    for edge in dag.edges:
        lines.append("\t".join(["edge", edge.from_id, edge.to_id, edge.kind]))
    return "\n".join(lines) + "\n"


def loads(text: str) -> ProvenanceDAG:
    """Parse the interchange format and validate the graph via build_dag."""
    lines = text.splitlines()
    if not lines or lines[0] != DAG_FORMAT_HEADER:
        raise ValueError(f"missing or unsupported header, expected {DAG_FORMAT_HEADER!r}")

    claim: Claim | None = None
    sources: list[SourceDoc] = []
    edges: list[tuple[str, str, str]] = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        fields = line.split("\t")
        record = fields[0]
        try:
            if record == "claim":
                if claim is not None:
                    raise ValueError("more than one claim record")
                n_pairs = int(fields[4])
                if len(fields) != 5 + 2 * n_pairs:
                    raise ValueError("claim record has wrong field count")
                pairs = tuple(
                    (
                        _unb64(fields[5 + 2 * i]).decode("utf-8"),
                        _unb64(fields[6 + 2 * i]).decode("utf-8"),
                    )
                    for i in range(n_pairs)
                )
                claim = Claim(
                    id=fields[1],
                    text=_unb64(fields[3]).decode("utf-8"),
                    asserted_values=pairs,
                    timestamp=None if fields[2] == "-" else int(fields[2]),
                )
            elif record == "source":
                if len(fields) != 5:
                    raise ValueError("source record has wrong field count")
                sources.append(
                    SourceDoc(
                        id=fields[1],
                        timestamp=int(fields[2]),
                        origin=_unb64(fields[3]).decode("utf-8"),
                        content=_unb64(fields[4]),
                    )
                )
            elif record == "edge":
                if len(fields) != 4:
                    raise ValueError("edge record has wrong field count")
                edges.append((fields[1], fields[2], fields[3]))
            else:
                raise ValueError(f"unknown record type {record!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc

    if claim is None:
        raise ValueError("document has no claim record")
    return build_dag(claim, sources, edges)


def dag_digest(dag: ProvenanceDAG) -> bytes:
    """Digest binding downstream artifacts to one canonical graph serialization."""
    return digest_source(dumps(dag).encode("utf-8"))
