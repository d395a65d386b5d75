#!/usr/bin/env python3
"""Regenerate the golden fixtures under tests/golden/.

Everything here is fixed — key seed, beacon, timestamps, graph content — so
the emitted bundle bytes are stable across runs and platforms. Re-run only
when the wire format intentionally changes, and commit the result.
"""

import hashlib
import json
from pathlib import Path

from factbundle import Claim, EncodingParams, KeyPair, SourceDoc, build_dag, build_bundle
from factbundle.bundle import BundleMeta, serialize_bundle
from factbundle.provenance import dumps

GOLDEN = Path(__file__).resolve().parent.parent / "tests" / "golden"

KEY_SEED = hashlib.sha256(b"golden fixture signing key").digest()
BEACON = hashlib.sha256(b"golden fixture beacon").digest()
ENTROPY = hashlib.sha256(b"golden fixture verifier entropy").digest()


def main() -> None:
    sources = [
        SourceDoc(
            id="census-table-q3",
            content=b"regional population counts, 2025 Q3",
            timestamp=1_758_000_000,
            origin="https://stats.example/census/q3",
        ),
        SourceDoc(
            id="methodology-note-7",
            content=b"sampling frame and weighting procedure, revision 7",
            timestamp=1_757_000_000,
            origin="https://stats.example/methods/7",
        ),
        SourceDoc(
            id="press-briefing-2025-09",
            content=b"september 2025 statistics office press briefing transcript",
            timestamp=1_758_100_000,
            origin="https://stats.example/press/2025-09",
        ),
    ]
    claim = Claim(
        id="population-growth-2025",
        text="Regional population grew 1.4% year over year in 2025 Q3",
        asserted_values=(("growth-rate", "1.4%"), ("period", "2025-Q3")),
        timestamp=1_758_200_000,
    )
    edges = [
        ("census-table-q3", "population-growth-2025", "derivation"),
        ("methodology-note-7", "population-growth-2025", "derivation"),
        ("census-table-q3", "population-growth-2025", "citation"),
        ("methodology-note-7", "census-table-q3", "derivation"),
        ("press-briefing-2025-09", "population-growth-2025", "citation"),
    ]
    dag = build_dag(claim, sources, edges)

    key = KeyPair.generate("statistics-office", seed=KEY_SEED)
    bundle = build_bundle(
        dag,
        EncodingParams(replication=2),
        key,
        BEACON,
        metadata=BundleMeta(publisher_id=key.publisher_id, timestamp=claim.timestamp or 0),
    )

    GOLDEN.mkdir(parents=True, exist_ok=True)
    (GOLDEN / "demo.dag").write_text(dumps(dag))
    (GOLDEN / "demo.fb").write_bytes(serialize_bundle(bundle))
    (GOLDEN / "registry.json").write_text(
        json.dumps({key.publisher_id: key.verification_key.hex()}, indent=2) + "\n"
    )
    (GOLDEN / "entropy.hex").write_text(ENTROPY.hex() + "\n")
    print(f"wrote fixtures to {GOLDEN}")
    print(f"bundle bytes: {len(serialize_bundle(bundle))}")
    print(f"root: {bundle.root.hex()}")


if __name__ == "__main__":
    main()
