"""Acceptance gate: nine end-to-end checks, one test each.

Run `pytest tests/test_acceptance.py -v` for one pass/fail line per check.
Statistical checks use fixed seeds and pinned tolerances (3-sigma binomial
slack where sampling is involved), so they are deterministic.
"""

import hashlib
import json
import math
import random
import time

import numpy as np

from factbundle.bundle import (
    BundleMeta,
    parse_bundle,
    sample_queries,
    serialize_bundle,
    signature_valid,
    signed_region_bytes,
    signed_region_span,
    build_bundle,
    registry_from_json,
)
from factbundle.cli import EX_OK, main
from factbundle.commit import build_tree, prove_inclusion, verify_inclusion
from factbundle.encode import EncodingParams
from factbundle.errors import FactBundleError
from factbundle.simulate import STRATEGIES, WorldParams, queries_for_advantage
from factbundle.tamper import MODE_LEAF_FRACTION, tamper_bundle
from factbundle.vca import SCENARIO_ACME_2026, case_study
from factbundle.verify import ACCEPT, VerifyPolicy, choose_k, count_human_steps, verify_bundle

from helpers import fixed_key, make_random_dag, sha

from pathlib import Path

GOLDEN = Path(__file__).parent / "golden"

# chi-squared 0.99 quantile at 15 degrees of freedom
CHI2_99_DF15 = 30.5779


def be8(i: int) -> bytes:
    return i.to_bytes(8, "big")


def test_a1_completeness_constant_human_steps():
    """1000 random honest graphs, k=3: every verification accepts in
    exactly 3 human steps, within a minute."""
    started = time.monotonic()
    rng = random.Random(20_260_101)
    key = fixed_key()
    registry = {key.publisher_id: key.verification_key}
    policy = VerifyPolicy(k=3)
    beacon = sha("a1 beacon")
    for trial in range(1000):
        dag = make_random_dag(rng, rng.randrange(2, 101))
        bundle = build_bundle(
            dag,
            EncodingParams(replication=1),
            key,
            beacon,
            metadata=BundleMeta(publisher_id=key.publisher_id, timestamp=trial),
        )
        entropy = hashlib.sha256(b"a1-entropy" + be8(trial)).digest()
        verdict = verify_bundle(bundle, registry, policy, entropy)
        assert verdict.outcome == ACCEPT, (trial, verdict.reason)
        assert count_human_steps(verdict.trace) == 3
    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"completeness run took {elapsed:.1f}s"


def test_a2_soundness_bound_under_half_tampering():
    """Half the leaves rewritten, k=10: accept rate stays within the
    (1-eta)^k = 2^-10 bound plus 3-sigma binomial slack."""
    started = time.monotonic()
    key = fixed_key()
    registry = {key.publisher_id: key.verification_key}
    dag = make_random_dag(random.Random(2024), 10)
    bundle = build_bundle(
        dag,
        EncodingParams(replication=2),
        key,
        sha("a2 beacon"),
        metadata=BundleMeta(publisher_id=key.publisher_id, timestamp=0),
    )
    data = serialize_bundle(bundle)
    tampered = parse_bundle(tamper_bundle(data, MODE_LEAF_FRACTION, 0.5, seed=7))

    total = len(bundle.leaf_packages)
    mutated = sum(
        1
        for before, after in zip(bundle.leaf_packages, tampered.leaf_packages)
        if before.leaf != after.leaf
    )
    assert total % 2 == 0 and mutated == total // 2  # eta is exactly one half

    trials = 10_000
    policy = VerifyPolicy(k=10)
    accepts = 0
    for trial in range(trials):
        entropy = hashlib.sha256(b"a2-entropy" + be8(trial)).digest()
        verdict = verify_bundle(tampered, registry, policy, entropy)
        accepts += verdict.outcome == ACCEPT
    bound = 2.0**-10
    allowed = bound + 3.0 * math.sqrt(bound * (1.0 - bound) / trials)
    assert accepts / trials <= allowed, (accepts, trials, allowed)
    elapsed = time.monotonic() - started
    assert elapsed < 120.0, f"soundness run took {elapsed:.1f}s"


def test_a3_spot_check_count_rule_matches_brute_force():
    """choose_k equals the smallest k with (1-g)^k <= beta, exactly,
    for 200 random (beta, g) pairs plus hand-picked edges."""

    def smallest_k(beta: float, g: float) -> int:
        k = 1
        while (1.0 - g) ** k > beta:
            k += 1
        return k

    assert choose_k(1e-3, 0.5) == smallest_k(1e-3, 0.5) == 10
    assert choose_k(0.5, 0.5) == 1
    assert choose_k(0.25, 0.5) == 2
    assert choose_k(1e-6, 1.0) == 1

    rng = random.Random(303)
    for _ in range(200):
        beta = 10.0 ** rng.uniform(-6.0, -0.05)
        g = rng.uniform(0.01, 1.0)
        assert choose_k(beta, g) == smallest_k(beta, g), (beta, g)


def test_a4_adversary_query_budget_scales_quadratically():
    """Query budget for advantage 0.5 against one planted pair grows as
    ~n^2: log-log slope within 2.0 +/- 0.3 over n in {20,40,80,160}."""
    started = time.monotonic()
    strategy = STRATEGIES["uniform-pairwise"]
    sizes = (20, 40, 80, 160)
    budgets = []
    for n in sizes:
        params = WorldParams(n=n, rho=0.5, planted_pairs=1, seed=0)
        result = queries_for_advantage(strategy, params, 0.5, 10_000, seed=0)
        budgets.append(result.t)
    slope = float(np.polyfit(np.log(sizes), np.log(budgets), 1)[0])
    assert 1.7 <= slope <= 2.3, (slope, budgets)
    elapsed = time.monotonic() - started
    assert elapsed < 600.0, f"scaling run took {elapsed:.1f}s"


def test_a5_case_study_cost_ratio_25_to_1(capsys):
    """The scenario report emits home cost 3, adversary cost 75, ratio 25."""
    code = main(["vca-report", "--scenario", "acme-2026"])
    out = capsys.readouterr().out
    assert code == EX_OK
    report = json.loads(out)
    assert report["home_cost"] == 3
    assert report["adversary_cost"] == 75
    assert report["ratio"] == 25
    assert report["ratio_exact"] == "25"


def test_a6_home_cost_flat_adversary_cost_quadratic():
    """Sweeping forged versions v=1..16: equipped cost pinned at k while
    the manual cost fits a quadratic in v with R^2 >= 0.95."""
    versions = list(range(1, 17))
    manual_costs = []
    for v in versions:
        result = case_study(SCENARIO_ACME_2026, forgeries=v, k=3)
        assert result.home.expected_cost == 3
        manual_costs.append(float(result.adversary.expected_cost))
    coeffs = np.polyfit(versions, manual_costs, 2)
    fitted = np.polyval(coeffs, versions)
    residual = np.sum((np.array(manual_costs) - fitted) ** 2)
    total = np.sum((np.array(manual_costs) - np.mean(manual_costs)) ** 2)
    r_squared = 1.0 - residual / total
    assert coeffs[0] > 0
    assert r_squared >= 0.95, r_squared


def test_a7_merkle_exhaustive_integrity():
    """Prove/verify round-trips for every leaf of every tree size up to 512;
    every single-leaf mutation changes the root for sizes up to 64."""
    for n in range(1, 513):
        leaves = [hashlib.sha256(b"leaf" + be8(i)).digest() for i in range(n)]
        tree = build_tree(leaves)
        bound = max(1, math.ceil(math.log2(n))) if n > 1 else 0
        for i in range(n):
            proof = prove_inclusion(tree, i)
            assert proof.leaf_index == i
            assert len(proof.path) <= bound
            assert verify_inclusion(tree.root, leaves[i], proof)

    for n in range(1, 65):
        leaves = [hashlib.sha256(b"leaf" + be8(i)).digest() for i in range(n)]
        base_root = build_tree(leaves).root
        for i in range(n):
            mutated = list(leaves)
            mutated[i] = hashlib.sha256(b"mutant" + be8(n) + be8(i)).digest()
            assert build_tree(mutated).root != base_root, (n, i)


def test_a8_sampling_uniformity_chi_squared():
    """10^5 single-index draws over a 16-leaf universe pass a chi-squared
    uniformity test at significance 0.01; fixed inputs replay identically."""
    root = sha("a8 root")
    beacon = sha("a8 beacon")
    counts = [0] * 16
    draws = 100_000
    for i in range(draws):
        entropy = hashlib.sha256(b"chi2" + be8(i)).digest()
        counts[sample_queries(root, beacon, entropy, 1, 16)[0]] += 1
    expected = draws / 16
    statistic = sum((c - expected) ** 2 / expected for c in counts)
    assert statistic < CHI2_99_DF15, (statistic, counts)

    entropy = sha("a8 replay entropy")
    first = sample_queries(root, beacon, entropy, 5, 16)
    assert first == sample_queries(root, beacon, entropy, 5, 16)
    assert first != sample_queries(root, beacon, sha("a8 other entropy"), 5, 16)


def test_a9_wire_format_stability_and_signed_region():
    """The golden bundle re-serializes byte-identically, and flipping any
    signed-region byte breaks parsing or the signature (10^3 positions)."""
    data = (GOLDEN / "demo.fb").read_bytes()
    bundle = parse_bundle(data)
    assert serialize_bundle(bundle) == data

    registry = registry_from_json((GOLDEN / "registry.json").read_text())
    key = registry[bundle.metadata.publisher_id]
    start, end = signed_region_span(data)
    rng = random.Random(99)
    for _ in range(1000):
        position = rng.randrange(start, end)
        mutated = bytearray(data)
        mutated[position] ^= rng.randrange(1, 256)
        try:
            reparsed = parse_bundle(bytes(mutated))
        except FactBundleError:
            continue  # fails closed at parse time
        payload = signed_region_bytes(
            reparsed.claim, reparsed.root, reparsed.query_spec, reparsed.metadata
        )
        assert not signature_valid(key, reparsed.signature, payload), position
