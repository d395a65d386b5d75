"""Bundle verification: one signature check plus k random spot-checks.

The verifier never re-derives constraints or refetches sources. It checks
the publisher signature over the signed region, samples k leaf indices from
the public query spec mixed with its own entropy, and for each sampled index
verifies the inclusion proof against the root and evaluates the leaf's
predicate against the shipped data. A tampered bundle with violated-leaf
fraction eta survives all k checks with probability at most (1 - eta)^k.

Spot-checks cost one human step each; the signature check and verdict
rendering are machine work and cost zero human steps. Machine time is
recorded per check in milliseconds for downstream cost accounting.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Mapping

from .bundle import Bundle, sample_queries, signature_valid, signed_region_bytes
from .commit import verify_inclusion
from .encode import evaluate_leaf, leaf_bytes
from .errors import DomainError, UnresolvableSubject
from .hashing import DIGEST_SIZE, digest_leaf

ACCEPT = "accept"
REJECT = "reject"
DEFER = "defer"

# Conditions a policy may route to defer instead of the default verdict.
UNKNOWN_PUBLISHER = "unknown-publisher"
EMPTY_LEAF_UNIVERSE = "empty-leaf-universe"

# Verdict reasons.
ALL_CHECKS_PASSED = "all-checks-passed"
SIGNATURE_ONLY = "signature-only"
BAD_SIGNATURE = "bad-signature"
SPOT_CHECK_FAILED = "spot-check-failed"


@dataclass(frozen=True)
class VerifyPolicy:
    """Verifier-side knobs.

    k is the spot-check count. beta is the target soundness error the k was
    chosen for (informational; use choose_k to derive k from it). eta_min is
    the smallest violated-leaf fraction the verifier wants protection
    against; accept confidence is computed as 1 - (1 - eta_min)^k. defer_on
    names the conditions that should yield a defer verdict rather than the
    default (reject for unknown publishers, accept-on-signature-alone for
    zero-leaf bundles).
    """

    k: int = 3
    beta: float | None = None
    eta_min: float = 0.5
    defer_on: frozenset[str] = field(default_factory=lambda: frozenset({UNKNOWN_PUBLISHER}))

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0.0 < self.eta_min <= 1.0:
            raise ValueError("eta_min must be in (0, 1]")
        if self.beta is not None and not 0.0 < self.beta < 1.0:
            raise ValueError("beta must be in (0, 1)")
        object.__setattr__(self, "defer_on", frozenset(self.defer_on))


@dataclass(frozen=True)
class CheckRecord:
    """One performed check with its cost annotations."""

    kind: str  # "signature" | "spot-check"
    passed: bool
    human_steps: int
    machine_ms: float
    index: int | None = None
    detail: str = ""


@dataclass(frozen=True)
class Verdict:
    outcome: str
    reason: str
    confidence: float | None
    trace: tuple[CheckRecord, ...]

    def as_dict(self) -> dict:
        """JSON-ready report: outcome, confidence, reason, trace, step count."""
        return {
            "outcome": self.outcome,
            "reason": self.reason,
            "confidence": self.confidence,
            "human_steps": count_human_steps(self.trace),
            "machine_ms": round(sum(rec.machine_ms for rec in self.trace), 3),
            "trace": [
                {
                    "kind": rec.kind,
                    "passed": rec.passed,
                    "human_steps": rec.human_steps,
                    "machine_ms": round(rec.machine_ms, 3),
                    "index": rec.index,
                    "detail": rec.detail,
                }
                for rec in self.trace
            ],
        }


def count_human_steps(trace: tuple[CheckRecord, ...] | list[CheckRecord]) -> int:
    """Human effort spent in a verification run: one step per spot-check."""
    return sum(rec.human_steps for rec in trace)


def choose_k(beta: float, eta: float, gamma: float = 1.0) -> int:
    """Smallest k with (1 - gamma*eta)^k <= beta.

    Matches a brute-force search exactly: the closed-form ceil is used only
    as a starting point and then adjusted with the same float predicate a
    linear scan would apply, so rounding at the boundary cannot disagree.
    """
    if not 0.0 < beta < 1.0:
        raise DomainError(f"beta must be in (0, 1), got {beta}")
    g = gamma * eta
    if not 0.0 < g <= 1.0:
        raise DomainError(f"gamma*eta must be in (0, 1], got {g}")
    if g == 1.0:
        return 1
    miss = 1.0 - g
    k = max(1, math.ceil(math.log(beta) / math.log(miss)))
    while k > 1 and miss ** (k - 1) <= beta:
        k -= 1
    while miss**k > beta:
        k += 1
    return k


def accept_confidence(k: int, eta: float, gamma: float = 1.0) -> float:
    """Confidence 1 - (1 - gamma*eta)^k that k clean spot-checks imply integrity."""
    return 1.0 - (1.0 - gamma * eta) ** k


def verify_bundle(
    bundle: Bundle,
    trusted_keys: Mapping[str, bytes],
    policy: VerifyPolicy,
    verifier_entropy: bytes,
) -> Verdict:
    """Run the full verification procedure. Total: never raises on bad input.

    Check order is fixed: signature first (reject immediately on failure,
    with zero human steps spent), then k spot-checks at indices derived from
    (root, beacon, entropy). The first failing spot-check rejects. When the
    bundle ships fewer leaves than k, every leaf is checked and confidence
    reflects the smaller count.
    """
    if len(verifier_entropy) != DIGEST_SIZE:
        raise ValueError(f"verifier entropy must be {DIGEST_SIZE} bytes")

    trace: list[CheckRecord] = []

    publisher = bundle.metadata.publisher_id
    key = trusted_keys.get(publisher)
    if key is None:
        trace.append(
            CheckRecord(
                kind="signature",
                passed=False,
                human_steps=0,
                machine_ms=0.0,
                detail=f"no trusted key for publisher {publisher!r}",
            )
        )
        outcome = DEFER if UNKNOWN_PUBLISHER in policy.defer_on else REJECT
        return Verdict(outcome, UNKNOWN_PUBLISHER, None, tuple(trace))

    started = time.perf_counter()
    payload = signed_region_bytes(
        bundle.claim, bundle.root, bundle.query_spec, bundle.metadata
    )
    sig_ok = signature_valid(key, bundle.signature, payload)
    trace.append(
        CheckRecord(
            kind="signature",
            passed=sig_ok,
            human_steps=0,
            machine_ms=(time.perf_counter() - started) * 1000.0,
            detail=f"publisher {publisher!r}",
        )
    )
    if not sig_ok:
        return Verdict(REJECT, BAD_SIGNATURE, None, tuple(trace))

    universe = bundle.query_spec.universe_size
    if universe == 0:
        if EMPTY_LEAF_UNIVERSE in policy.defer_on:
            return Verdict(DEFER, EMPTY_LEAF_UNIVERSE, None, tuple(trace))
        # Nothing to spot-check: the signature alone backs the claim.
        return Verdict(ACCEPT, SIGNATURE_ONLY, 0.0, tuple(trace))

    k_eff = min(policy.k, universe)
    indices = sample_queries(
        bundle.root, bundle.query_spec.beacon, verifier_entropy, k_eff, universe
    )
    nodes = bundle.node_view()
    for index in indices:
        started = time.perf_counter()
        package = bundle.leaf_packages[index]
        included = package.proof.leaf_index == index and verify_inclusion(
            bundle.root, digest_leaf(leaf_bytes(package.leaf)), package.proof
        )
        if included:
            try:
                holds = evaluate_leaf(package.leaf, nodes)
            except UnresolvableSubject:
                holds = False
            passed = holds
            detail = "" if holds else "predicate violated"
        else:
            passed = False
            detail = "inclusion proof failed"
        trace.append(
            CheckRecord(
                kind="spot-check",
                passed=passed,
                human_steps=1,
                machine_ms=(time.perf_counter() - started) * 1000.0,
                index=index,
                detail=detail,
            )
        )
        if not passed:
            return Verdict(REJECT, SPOT_CHECK_FAILED, None, tuple(trace))

    return Verdict(
        ACCEPT,
        ALL_CHECKS_PASSED,
        accept_confidence(k_eff, policy.eta_min),
        tuple(trace),
    )
