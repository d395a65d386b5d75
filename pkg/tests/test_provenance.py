"""Graph validation, canonicalization, digests, and the text interchange format."""

import hashlib
import random

import pytest

from factbundle import Claim, Edge, SourceDoc, build_dag, dag_digest
from factbundle.errors import CycleDetected, DanglingEdge, DuplicateId
from factbundle.provenance import (
    CITATION,
    DERIVATION,
    claim_canonical_bytes,
    digest_source,
    dumps,
    loads,
    node_digest,
)

from helpers import make_random_dag


def _docs():
    a = SourceDoc(id="a", content=b"first", timestamp=1, origin="o1")
    b = SourceDoc(id="b", content=b"second", timestamp=2, origin="o2")
    return a, b


def _claim(ts=10):
    return Claim(id="c", text="claim text", asserted_values=(("k", "v"),), timestamp=ts)


def test_source_digest_matches_manual_hash():
    doc = SourceDoc(id="a", content=b"payload", timestamp=0, origin="x")
    assert doc.digest == hashlib.sha256(b"\x00" + b"payload").digest()


def test_explicit_stale_digest_is_preserved():
    """A caller-supplied digest is kept verbatim, modelling post-digest mutation."""
    stale = digest_source(b"what the content used to be")
    doc = SourceDoc(id="a", content=b"current content", timestamp=0, origin="x", digest=stale)
    assert doc.digest == stale
    assert node_digest(doc) == digest_source(b"current content")
    assert node_digest(doc) != doc.digest


def test_build_dag_sorts_sources_and_edges():
    a, b = _docs()
    claim = _claim()
    dag = build_dag(claim, [b, a], [("b", "c", DERIVATION), ("a", "c", DERIVATION)])
    assert [d.id for d in dag.sources] == ["a", "b"]
    assert [(e.from_id, e.to_id) for e in dag.edges] == [("a", "c"), ("b", "c")]


def test_build_dag_collapses_duplicate_edges():
    a, b = _docs()
    dag = build_dag(_claim(), [a, b], [("a", "c", CITATION)] * 3 + [("b", "c", DERIVATION)])
    assert len(dag.edges) == 2


def test_duplicate_id_rejected():
    a, _ = _docs()
    twin = SourceDoc(id="a", content=b"other", timestamp=5, origin="o")
    with pytest.raises(DuplicateId):
        build_dag(_claim(), [a, twin], [])
    with pytest.raises(DuplicateId):
        build_dag(_claim(), [SourceDoc(id="c", content=b"x", timestamp=1, origin="o")], [])


def test_dangling_edge_rejected():
    a, _ = _docs()
    with pytest.raises(DanglingEdge):
        build_dag(_claim(), [a], [("a", "ghost", DERIVATION)])


def test_cycles_rejected():
    a, b = _docs()
    with pytest.raises(CycleDetected):
        build_dag(_claim(), [a], [("a", "a", DERIVATION)])
    with pytest.raises(CycleDetected):
        build_dag(
            _claim(),
            [a, b],
            [("a", "b", DERIVATION), ("b", "a", DERIVATION)],
        )


def test_claim_only_graph_is_valid():
    dag = build_dag(_claim(), [], [])
    assert dag.sources == ()
    assert dag.edges == ()


def test_edge_kind_validated():
    with pytest.raises(ValueError):
        Edge("a", "b", "supersedes")


def test_node_ids_validated():
    with pytest.raises(ValueError):
        SourceDoc(id="", content=b"x", timestamp=0, origin="o")
    with pytest.raises(ValueError):
        SourceDoc(id="has\ttab", content=b"x", timestamp=0, origin="o")
    with pytest.raises(ValueError):
        Claim(id="nl\n", text="t", asserted_values=())


def test_claim_timestamp_is_optional_and_changes_encoding():
    with_ts = _claim(ts=10)
    without = Claim(id="c", text="claim text", asserted_values=(("k", "v"),))
    assert without.timestamp is None
    assert claim_canonical_bytes(with_ts) != claim_canonical_bytes(without)


def test_text_format_round_trip_random_graphs():
    rng = random.Random(0xD06)
    for _ in range(25):
        dag = make_random_dag(rng, rng.randrange(1, 12))
        again = loads(dumps(dag))
        assert again == dag
        assert dag_digest(again) == dag_digest(dag)


def test_text_format_survives_awkward_content():
    doc = SourceDoc(
        id="a", content=b"tabs\tnewlines\nand \xff bytes", timestamp=-5, origin="sp ace\tt"
    )
    claim = Claim(id="c", text="text with\ttab and\nnewline", asserted_values=(("a\tb", "c\nd"),))
    dag = build_dag(claim, [doc], [("a", "c", CITATION)])
    assert loads(dumps(dag)) == dag


def test_text_format_rejects_garbage():
    with pytest.raises(ValueError):
        loads("not the header\n")
    with pytest.raises(ValueError):
        loads("fbdag 1\nwidget\tx\n")
    with pytest.raises(ValueError):
        loads("fbdag 1\nsource\tonly-two-fields\n")
    with pytest.raises(ValueError):
        loads("fbdag 1\n")  # no claim record


def test_dag_digest_tracks_content():
    a, b = _docs()
    dag1 = build_dag(_claim(), [a, b], [("a", "c", DERIVATION)])
    changed = SourceDoc(id="a", content=b"first!", timestamp=1, origin="o1")
    dag2 = build_dag(_claim(), [changed, b], [("a", "c", DERIVATION)])
    assert dag_digest(dag1) != dag_digest(dag2)


def test_canonical_form_independent_of_input_order():
    rng = random.Random(7)
    dag = make_random_dag(rng, 8)
    shuffled_sources = list(dag.sources)
    shuffled_edges = [(e.from_id, e.to_id, e.kind) for e in dag.edges]
    rng.shuffle(shuffled_sources)
    rng.shuffle(shuffled_edges)
    rebuilt = build_dag(dag.claim, shuffled_sources, shuffled_edges)
    assert rebuilt == dag
    assert dumps(rebuilt) == dumps(dag)
