"""Verification-cost accounting and the asymmetry ratio.

Expected verification cost for a population is

    cost = mean(human steps) + alpha * mean(machine time)

computed in exact rational arithmetic (fractions.Fraction throughout; floats
are converted exactly, never rounded). The verification-cost-asymmetry ratio
compares an adversary-exposed population's expected cost against a tooled
home population's.

The shipped "acme-2026" scenario scripts a forged-economic-report campaign:
the home population verifies a signed bundle (the cost is measured by
actually running the verifier, k = 3 spot-checks, one tap each), while the
adversary-exposed population follows a manual checklist — website check,
cross-referencing, citation chasing, domain inspection, press-office contact
— whose step costs are fixed integers inside the checklist's documented
ranges, totalling 75. The forgery-count sweep replaces the fixed checklist
with a pairwise cross-referencing procedure over v forged versions plus the
authentic one, so the manual step count grows quadratically in v while the
equipped cost stays pinned at k.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .bundle import Bundle, BundleMeta, KeyPair, build_bundle
from .encode import EncodingParams
from .errors import EmptyClaimSet, UnknownScenario, ZeroHomeCost
from .provenance import CITATION, DERIVATION, Claim, SourceDoc, build_dag
from .verify import VerifyPolicy, count_human_steps, verify_bundle

Rational = int | float | Fraction


@dataclass(frozen=True)
class Population:
    """A verifier population as modelled: cognitive step budget per attempt,
    working-memory chunk bound, labelled priors (opaque, reporting only),
    and whether it has bundle tooling."""

    name: str
    budget: int
    memory: int
    priors: Mapping[str, str] = field(default_factory=dict)
    equipped: bool = False

    def __post_init__(self) -> None:
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.memory < 1:
            raise ValueError("memory bound must be >= 1")
        object.__setattr__(self, "priors", dict(self.priors))


@dataclass(frozen=True)
class CostModel:
    """alpha weights machine time (milliseconds) against human steps."""

    alpha: Fraction = Fraction(0)
    machine_time_unit: str = "ms"

    def __post_init__(self) -> None:
        alpha = _exact(self.alpha)
        if alpha < 0:
            raise ValueError("alpha must be >= 0")
        object.__setattr__(self, "alpha", alpha)


@dataclass(frozen=True)
class ClaimCost:
    claim: str
    human_steps: Fraction
    machine_ms: Fraction
    truncated: bool


@dataclass(frozen=True)
class CostReport:
    population: str
    sample_size: int
    mean_human_steps: Fraction
    mean_machine_ms: Fraction
    alpha: Fraction
    expected_cost: Fraction
    per_claim: tuple[ClaimCost, ...]

    def as_dict(self) -> dict:
        return {
            "population": self.population,
            "sample_size": self.sample_size,
            "mean_human_steps": _json_number(self.mean_human_steps),
            "mean_machine_ms": _json_number(self.mean_machine_ms),
            "alpha": _json_number(self.alpha),
            "expected_cost": _json_number(self.expected_cost),
            "expected_cost_exact": str(self.expected_cost),
            "per_claim": [
                {
                    "claim": cost.claim,
                    "human_steps": _json_number(cost.human_steps),
                    "machine_ms": _json_number(cost.machine_ms),
                    "truncated": cost.truncated,
                }
                for cost in self.per_claim
            ],
        }


@dataclass(frozen=True)
class ScriptStep:
    actor: str
    action: str
    human_steps: int
    machine_ms: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        if self.human_steps < 0:
            raise ValueError("step cost must be a non-negative integer")
        object.__setattr__(self, "machine_ms", _exact(self.machine_ms))


@dataclass(frozen=True)
class ScenarioScript:
    """Ordered manual-verification procedure with per-step costs."""

    name: str
    steps: tuple[ScriptStep, ...]

    def total_human_steps(self) -> int:
        return sum(step.human_steps for step in self.steps)

    def total_machine_ms(self) -> Fraction:
        return sum((step.machine_ms for step in self.steps), Fraction(0))

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "total_human_steps": self.total_human_steps(),
            "steps": [
                {
                    "actor": step.actor,
                    "action": step.action,
                    "human_steps": step.human_steps,
                    "machine_ms": _json_number(step.machine_ms),
                }
                for step in self.steps
            ],
        }


def _exact(value: Rational) -> Fraction:
    """Exact Fraction conversion; binary floats convert losslessly."""
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


def _json_number(value: Fraction) -> int | float:
    if value.denominator == 1:
        return int(value)
    return float(value)


Adapter = Callable[[str], tuple[Rational, Rational]]


def expected_cost(
    population: Population,
    claims: Iterable[str],
    adapter: Adapter,
    model: CostModel,
) -> CostReport:
    """Mean verification cost over claims for one population.

    The adapter maps a claim to (human steps, machine ms): for equipped
    populations it should run the verifier and count trace steps, for
    unequipped populations it should replay a manual-procedure script.
    Attempts whose human steps exceed the population budget are truncated at
    the budget and flagged (the verifier gave up: a defer, not a success).
    """
    claim_list = list(claims)
    if not claim_list:
        raise EmptyClaimSet("expected_cost needs at least one claim")
    per: list[ClaimCost] = []
    for claim in claim_list:
        human_raw, machine_raw = adapter(claim)
        human = _exact(human_raw)
        machine = _exact(machine_raw)
        truncated = human > population.budget
        if truncated:
            human = Fraction(population.budget)
        per.append(
            ClaimCost(
                claim=str(claim), human_steps=human, machine_ms=machine, truncated=truncated
            )
        )
    size = len(per)
    mean_human = sum((c.human_steps for c in per), Fraction(0)) / size
    mean_machine = sum((c.machine_ms for c in per), Fraction(0)) / size
    return CostReport(
        population=population.name,
        sample_size=size,
        mean_human_steps=mean_human,
        mean_machine_ms=mean_machine,
        alpha=model.alpha,
        expected_cost=mean_human + model.alpha * mean_machine,
        per_claim=tuple(per),
    )


def vca_ratio(cost_adversary: CostReport, cost_home: CostReport) -> Fraction:
    """Adversary-to-home expected-cost ratio, exact."""
    if cost_home.expected_cost <= 0:
        raise ZeroHomeCost("home population expected cost must be positive")
    return cost_adversary.expected_cost / cost_home.expected_cost


def script_adapter(script: ScenarioScript) -> Adapter:
    """Adapter replaying a fixed manual procedure for every claim."""

    def run(_claim: str) -> tuple[Rational, Rational]:
        return script.total_human_steps(), script.total_machine_ms()

    return run


# --- shipped scenario: forged economic report campaign ---

SCENARIO_ACME_2026 = "acme-2026"
_ACME_CLAIM_ID = "acme-economic-report-2026-q1"

HOME_POPULATION = Population(
    name="home-equipped",
    budget=1_000_000,
    memory=7,
    priors={"trust-anchor": "department signing key", "tooling": "bundle app"},
    equipped=True,
)
ADVERSARY_POPULATION = Population(
    name="adversary-exposed",
    budget=1_000_000,
    memory=7,
    priors={"trust-anchor": "none", "tooling": "browser only"},
    equipped=False,
)


def home_script(k: int = 3) -> ScenarioScript:
    """The equipped procedure: signature is automatic, one tap per spot-check."""
    steps = [
        ScriptStep("home", "download bundle from verified source", 0),
        ScriptStep("home", "automatic signature verification", 0),
    ]
    steps += [
        ScriptStep("home", f"sample constraint check {i + 1} of {k} (one tap)", 1)
        for i in range(k)
    ]
    steps.append(ScriptStep("home", "read authenticity signal", 0))
    return ScenarioScript(name=f"equipped-spot-check-k{k}", steps=tuple(steps))


def manual_baseline_script() -> ScenarioScript:
    """The adversary-exposed checklist with fixed integer costs, total 75.

    Each cost sits inside its checklist range: website navigation 8 of 5-10,
    cross-referencing 14 of 10-15 per comparison (two comparisons), citation
    verification 21 of 20+, domain and certificate inspection 8 of 5-10,
    press-office contact 10 of 10+.
    """
    steps = (
        ScriptStep("adversary-exposed", "manually check government website", 8),
        ScriptStep("adversary-exposed", "cross-reference data points (comparison 1 of 2)", 14),
        ScriptStep("adversary-exposed", "cross-reference data points (comparison 2 of 2)", 14),
        ScriptStep("adversary-exposed", "verify source citations for suspicious figures", 21),
        ScriptStep("adversary-exposed", "check domain authenticity and certificates", 8),
        ScriptStep("adversary-exposed", "contact press office", 10),
    )
    return ScenarioScript(name="manual-baseline", steps=steps)


def manual_sweep_script(forgeries: int) -> ScenarioScript:
    """Exhaustive manual procedure against v forged versions.

    All pairs among the v forgeries plus the authentic report are
    cross-referenced (12 steps per comparison), each forgery's suspicious
    figure gets one citation verification (21 steps), and the fixed website,
    domain, and press-office steps are paid once. Total is quadratic in v:
    6v^2 + 27v + 26.
    """
    if forgeries < 1:
        raise ValueError("forgery count must be >= 1")
    steps = [ScriptStep("adversary-exposed", "manually check government website", 8)]
    comparisons = math.comb(forgeries + 1, 2)
    steps += [
        ScriptStep(
            "adversary-exposed",
            f"cross-reference versions (comparison {i + 1} of {comparisons})",
            12,
        )
        for i in range(comparisons)
    ]
    steps += [
        ScriptStep(
            "adversary-exposed",
            f"verify citations for forged version {i + 1} of {forgeries}",
            21,
        )
        for i in range(forgeries)
    ]
    steps.append(ScriptStep("adversary-exposed", "check domain authenticity and certificates", 8))
    steps.append(ScriptStep("adversary-exposed", "contact press office", 10))
    return ScenarioScript(name=f"manual-pairwise-crossref-v{forgeries}", steps=tuple(steps))


def _demo_bundle() -> tuple[Bundle, dict[str, bytes]]:
    """Deterministic signed bundle for the scenario's authentic report."""
    key = KeyPair.generate(
        "dept-economic-analysis", seed=hashlib.sha256(b"acme-2026 demo signing key").digest()
    )
    sources = [
        SourceDoc(
            id="dea-statistical-appendix-q1",
            content=b"unemployment 4.1%; inflation forecast 2.1%; gdp growth 2.3%",
            timestamp=1_767_139_200,
            origin="https://depteconomics.example/statistics/q1",
        ),
        SourceDoc(
            id="dea-methodology-notes",
            content=b"survey design, seasonal adjustment, revision policy",
            timestamp=1_767_052_800,
            origin="https://depteconomics.example/methodology",
        ),
        SourceDoc(
            id="dea-press-release-q1",
            content=b"quarterly economic indicators for Q1 2026",
            timestamp=1_767_225_600,
            origin="https://depteconomics.example/press/q1",
        ),
    ]
    claim = Claim(
        id=_ACME_CLAIM_ID,
        text="Acme Economic Report 2026 Q1: unemployment 4.1%, inflation forecast 2.1%",
        asserted_values=(
            ("unemployment-rate", "4.1%"),
            ("inflation-forecast", "2.1%"),
            ("gdp-growth", "2.3%"),
        ),
        timestamp=1_767_312_000,
    )
    edges = [(doc.id, claim.id, DERIVATION) for doc in sources]
    edges += [(doc.id, claim.id, CITATION) for doc in sources]
    dag = build_dag(claim, sources, edges)
    beacon = hashlib.sha256(b"acme-2026 randomness beacon").digest()
    bundle = build_bundle(
        dag,
        EncodingParams(replication=1),
        key,
        beacon,
        metadata=BundleMeta(publisher_id=key.publisher_id, timestamp=claim.timestamp or 0),
    )
    return bundle, {key.publisher_id: key.verification_key}


def equipped_adapter(k: int = 3, seed: int = 0) -> Adapter:
    """Adapter that really runs the verifier against the scenario bundle.

    Human steps come from the verification trace (= k spot-check taps);
    machine milliseconds are the measured check times.
    """
    bundle, registry = _demo_bundle()
    policy = VerifyPolicy(k=k)

    def run(claim: str) -> tuple[Rational, Rational]:
        entropy = hashlib.sha256(f"acme-entropy/{seed}/{claim}".encode()).digest()
        verdict = verify_bundle(bundle, registry, policy, entropy)
        machine_ms = sum(rec.machine_ms for rec in verdict.trace)
        return count_human_steps(verdict.trace), machine_ms

    return run


@dataclass(frozen=True)
class CaseStudyResult:
    scenario: str
    forgeries: int | None
    k: int
    home: CostReport
    adversary: CostReport
    ratio: Fraction
    home_procedure: ScenarioScript
    adversary_procedure: ScenarioScript

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "forgeries": self.forgeries,
            "k": self.k,
            "populations": {
                "home": _population_dict(HOME_POPULATION),
                "adversary": _population_dict(ADVERSARY_POPULATION),
            },
            "home": self.home.as_dict(),
            "adversary": self.adversary.as_dict(),
            "home_cost": _json_number(self.home.expected_cost),
            "adversary_cost": _json_number(self.adversary.expected_cost),
            "ratio": _json_number(self.ratio),
            "ratio_exact": str(self.ratio),
            "procedures": {
                "home": self.home_procedure.as_dict(),
                "adversary": self.adversary_procedure.as_dict(),
            },
        }


def _population_dict(population: Population) -> dict:
    return {
        "name": population.name,
        "budget": population.budget,
        "memory": population.memory,
        "priors": dict(population.priors),
        "equipped": population.equipped,
    }


def case_study(
    scenario: str,
    forgeries: int | None = None,
    alpha: Rational = 0,
    k: int = 3,
    seed: int = 0,
) -> CaseStudyResult:
    """Run a shipped scenario and return paired cost reports plus the ratio.

    Without a forgery count this reproduces the baseline campaign (six
    forged versions in circulation, manual checklist cost 75 vs equipped
    cost 3, ratio 25 at alpha = 0). With a forgery count v it swaps in the
    pairwise cross-referencing procedure, whose cost grows quadratically in
    v while the equipped cost stays at k.
    """
    if scenario != SCENARIO_ACME_2026:
        raise UnknownScenario(
            f"unknown scenario {scenario!r}; available: {SCENARIO_ACME_2026}"
        )
    model = CostModel(alpha=_exact(alpha))
    claims = [_ACME_CLAIM_ID]

    home_proc = home_script(k)
    home = expected_cost(HOME_POPULATION, claims, equipped_adapter(k=k, seed=seed), model)

    if forgeries is None:
        adversary_proc = manual_baseline_script()
    else:
        adversary_proc = manual_sweep_script(forgeries)
    adversary = expected_cost(
        ADVERSARY_POPULATION, claims, script_adapter(adversary_proc), model
    )

    return CaseStudyResult(
        scenario=scenario,
        forgeries=forgeries,
        k=k,
        home=home,
        adversary=adversary,
        ratio=vca_ratio(adversary, home),
        home_procedure=home_proc,
        adversary_procedure=adversary_proc,
    )
