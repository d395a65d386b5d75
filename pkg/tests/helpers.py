"""Shared fixtures for the test suite: random honest graphs and fixed keys."""

import hashlib
import random

from factbundle import Claim, KeyPair, SourceDoc, build_dag
from factbundle.provenance import CITATION, DERIVATION


def sha(label: str) -> bytes:
    """Deterministic 32 bytes from a label; used for seeds/beacons/entropy."""
    return hashlib.sha256(label.encode()).digest()


def fixed_key(publisher: str = "test-publisher") -> KeyPair:
    return KeyPair.generate(publisher, seed=sha(f"key/{publisher}"))


def make_random_dag(rng: random.Random, n_sources: int):
    """A random honest provenance graph.

    Timestamps increase with source index and the claim postdates everything,
    so every derivable constraint holds by construction. Each source feeds
    the claim via a derivation edge; citations and source-to-source
    derivations are sprinkled in at random.
    """
    sources = []
    for i in range(n_sources):
        sources.append(
            SourceDoc(
                id=f"src-{i:03d}",
                content=rng.randbytes(rng.randrange(1, 64)),
                timestamp=1_000 + 10 * i + rng.randrange(5),
                origin=f"https://example.org/doc/{i}",
            )
        )
    claim = Claim(
        id="claim-under-test",
        text=f"aggregate finding over {n_sources} documents",
        asserted_values=(("n-sources", str(n_sources)),),
        timestamp=1_000 + 10 * n_sources + rng.randrange(100),
    )
    edges = [(doc.id, claim.id, DERIVATION) for doc in sources]
    for doc in sources:
        if rng.random() < 0.5:
            edges.append((doc.id, claim.id, CITATION))
    # source -> source derivations only from older to newer, keeping the
    # graph acyclic and the timestamp-order constraints satisfied
    for j in range(1, n_sources):
        if rng.random() < 0.2:
            i = rng.randrange(j)
            edges.append((sources[i].id, sources[j].id, DERIVATION))
    return build_dag(claim, sources, edges)
