"""Adversarial query-cost simulation.

Models a distinguisher that must tell an honest world H from a fabricated
world F using unit-cost singleton or pairwise consistency queries. A world
has n coordinates; a public hidden subset of size floor(rho*n) is where
fabrication can live. In F, a configured number of hidden pairs are planted
inconsistent (pairwise queries on them return False) and hidden singletons
are noisy (each query independently reports inconsistency with probability
rho). Visible coordinates are always consistent, and H worlds are consistent
everywhere, so any observed inconsistency is decisive evidence for F.

The headline measurement: the query budget t* needed to reach distinguishing
advantage epsilon grows quadratically in n for pairwise strategies when the
planted-pair count is held constant, because the planted pairs hide among
C(floor(rho*n), 2) candidates.

Two execution paths produce the same distributions:

* a literal per-query simulation through `Oracle` (supports adaptive
  strategies, used as ground truth in tests), and
* a vectorized path that draws the per-trial hit counts directly from their
  exact distributions (binomial for uniform queries with replacement,
  hypergeometric for exhaustive scans), used for large budget sweeps.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import random
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExhausted, IndexOutOfRange, InvalidParams

WORLD_HONEST = "H"
WORLD_FABRICATED = "F"

_CI_Z99 = 2.5758293035489004  # two-sided 99% normal quantile


@dataclass(frozen=True)
class WorldParams:
    """Shared parameters for one H/F world pair."""

    n: int
    rho: float
    planted_pairs: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidParams("n must be >= 1")
        if not 0.0 < self.rho < 1.0:
            raise InvalidParams("rho must be in (0, 1)")
        if self.planted_pairs < 0:
            raise InvalidParams("planted_pairs must be >= 0")
        if self.planted_pairs > 0:
            if self.hidden_count < 2:
                raise InvalidParams(
                    f"floor(rho*n) = {self.hidden_count} < 2 cannot host planted pairs"
                )
            if self.planted_pairs > self.hidden_pair_count:
                raise InvalidParams(
                    f"cannot plant {self.planted_pairs} pairs among "
                    f"{self.hidden_pair_count} hidden pairs"
                )

    @property
    def hidden_count(self) -> int:
        return int(self.rho * self.n)

    @property
    def hidden_pair_count(self) -> int:
        return math.comb(self.hidden_count, 2)


@dataclass(frozen=True)
class World:
    """One sampled world. Strategies never touch this directly; they query
    an Oracle so every bit of information costs one query."""

    label: str
    n: int
    rho: float
    attributes: tuple[int, ...]
    hidden: tuple[int, ...]
    inconsistent_pairs: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.label not in (WORLD_HONEST, WORLD_FABRICATED):
            raise InvalidParams(f"label must be H or F, got {self.label!r}")
        if self.label == WORLD_HONEST and self.inconsistent_pairs:
            raise InvalidParams("honest worlds have no inconsistent pairs")
        hidden = set(self.hidden)
        for a, b in self.inconsistent_pairs:
            if a not in hidden or b not in hidden:
                raise InvalidParams("inconsistent pairs must lie inside the hidden set")


def plant_world(params: WorldParams, label: str, rng: random.Random) -> World:
    """Sample a world: hidden set, attribute bits, and (for F) planted pairs.

    The planted pairs are drawn uniformly without replacement from the
    hidden-pair universe. Deterministic given the rng state.
    """
    if label not in (WORLD_HONEST, WORLD_FABRICATED):
        raise InvalidParams(f"label must be H or F, got {label!r}")
    hidden = tuple(sorted(rng.sample(range(params.n), params.hidden_count)))
    attributes = tuple(rng.getrandbits(1) for _ in range(params.n))
    pairs: frozenset[tuple[int, int]] = frozenset()
    if label == WORLD_FABRICATED and params.planted_pairs > 0:
        universe = list(itertools.combinations(hidden, 2))
        pairs = frozenset(rng.sample(universe, params.planted_pairs))
    return World(
        label=label,
        n=params.n,
        rho=params.rho,
        attributes=attributes,
        hidden=hidden,
        inconsistent_pairs=pairs,
    )


class Oracle:
    """Unit-cost query interface over one world.

    Each singleton/pairwise call costs exactly 1 and is counted in `spent`.
    Calls beyond the budget raise BudgetExhausted; strategies are expected
    to stop on their own, the raise is a safety net. Singleton answers on
    hidden coordinates of an F world are freshly noisy per call (reporting
    inconsistency with probability rho), which is why `noise` is a separate
    rng stream from the strategy's own.
    """

    def __init__(self, world: World, noise: random.Random, budget: int | None = None):
        self._world = world
        self._noise = noise
        self._budget = budget
        self._hidden = set(world.hidden)
        self.spent = 0

    def _charge(self) -> None:
        if self._budget is not None and self.spent >= self._budget:
            raise BudgetExhausted(f"query budget {self._budget} exhausted")
        self.spent += 1

    def singleton(self, i: int) -> bool:
        """Consistency bit for coordinate i; False is decisive evidence for F."""
        if not 0 <= i < self._world.n:
            raise IndexOutOfRange(f"coordinate {i} not in [0, {self._world.n})")
        self._charge()
        if self._world.label == WORLD_FABRICATED and i in self._hidden:
            return self._noise.random() >= self._world.rho
        return True

    def pairwise(self, i: int, j: int) -> bool:
        """Cross-consistency of coordinates i and j; False iff planted."""
        for idx in (i, j):
            if not 0 <= idx < self._world.n:
                raise IndexOutOfRange(f"coordinate {idx} not in [0, {self._world.n})")
        self._charge()
        key = (i, j) if i < j else (j, i)
        return key not in self._world.inconsistent_pairs


@dataclass(frozen=True)
class QueryBudgetResult:
    """Advantage estimate for one (strategy, params, budget) point."""

    strategy: str
    t: int
    epsilon_hat: float
    rate_fabricated: float
    rate_honest: float
    trials: int
    seed: int
    ci_low: float
    ci_high: float


# --- strategies ---


class UniformPairwise:
    """Query uniformly random hidden pairs, with replacement across queries.

    Flags F on the first inconsistent answer. Never false-positives in H.
    Expected detection rate in F with p planted pairs among M hidden pairs
    is 1 - (1 - p/M)^t.
    """

    name = "uniform-pairwise"
    has_fast_path = True

    def decide(self, oracle: Oracle, hidden: tuple[int, ...], budget: int,
               rng: random.Random) -> bool:
        if len(hidden) < 2:
            return False
        for _ in range(budget):
            i, j = rng.sample(hidden, 2)
            if not oracle.pairwise(i, j):
                return True
        return False

    def fast_rates(self, params: WorldParams, t: int, trials: int,
                   rng: np.random.Generator) -> tuple[float, float]:
        pairs = params.hidden_pair_count
        if pairs == 0 or t == 0:
            return 0.0, 0.0
        # Hit count per trial is exactly Binomial(t, planted/pairs).
        hit_rate = params.planted_pairs / pairs
        detected = rng.binomial(t, hit_rate, size=trials) > 0
        return float(np.mean(detected)), 0.0


class ExhaustivePairwise:
    """Scan hidden pairs in a fixed order until the budget runs out.

    With budget >= C(hidden, 2) this always detects any planted pair.
    """

    name = "exhaustive-pairwise"
    has_fast_path = True

    def decide(self, oracle: Oracle, hidden: tuple[int, ...], budget: int,
               rng: random.Random) -> bool:
        for i, j in itertools.islice(itertools.combinations(hidden, 2), budget):
            if not oracle.pairwise(i, j):
                return True
        return False

    def fast_rates(self, params: WorldParams, t: int, trials: int,
                   rng: np.random.Generator) -> tuple[float, float]:
        pairs = params.hidden_pair_count
        if pairs == 0 or t == 0 or params.planted_pairs == 0:
            return 0.0, 0.0
        # The planted pairs are uniform over the universe, so the number
        # inside any fixed t-subset is hypergeometric.
        scanned = min(t, pairs)
        found = rng.hypergeometric(
            params.planted_pairs, pairs - params.planted_pairs, scanned, size=trials
        )
        return float(np.mean(found > 0)), 0.0


class SingletonMajority:
    """Query uniformly random hidden singletons and tally inconsistencies.

    Because honest worlds never report an inconsistent singleton, any
    nonzero tally is decisive, so the majority rule degenerates to
    flag-on-first-failure. Detection per query in F is Bernoulli(rho).
    """

    name = "singleton-majority"
    has_fast_path = True

    def decide(self, oracle: Oracle, hidden: tuple[int, ...], budget: int,
               rng: random.Random) -> bool:
        if not hidden:
            return False
        for _ in range(budget):
            if not oracle.singleton(rng.choice(hidden)):
                return True
        return False

    def fast_rates(self, params: WorldParams, t: int, trials: int,
                   rng: np.random.Generator) -> tuple[float, float]:
        if params.hidden_count == 0 or t == 0:
            return 0.0, 0.0
        detected = rng.binomial(t, params.rho, size=trials) > 0
        return float(np.mean(detected)), 0.0


class GreedyAdaptive:
    """Adaptive two-phase probe: cheap singleton scan, then pairwise sweep.

    Spends up to half the budget sampling hidden singletons (each failure is
    decisive); if that stays clean, sweeps hidden pairs in a random order
    with the remainder. Exists to exercise the adaptive strategy interface;
    it has no closed-form fast path.
    """

    name = "greedy-adaptive"
    has_fast_path = False

    def decide(self, oracle: Oracle, hidden: tuple[int, ...], budget: int,
               rng: random.Random) -> bool:
        if not hidden:
            return False
        singleton_budget = budget // 2
        for _ in range(singleton_budget):
            if not oracle.singleton(rng.choice(hidden)):
                return True
        remaining = budget - singleton_budget
        pairs = list(itertools.combinations(hidden, 2))
        rng.shuffle(pairs)
        for i, j in pairs[:remaining]:
            if not oracle.pairwise(i, j):
                return True
        return False


STRATEGIES = {
    strategy.name: strategy
    for strategy in (
        UniformPairwise(),
        ExhaustivePairwise(),
        SingletonMajority(),
        GreedyAdaptive(),
    )
}


def _child_seed(seed: int, *labels: int | str) -> int:
    """Stable 64-bit child seed derived by hashing (seed, labels)."""
    h = hashlib.sha256(str(seed).encode())
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode())
    return int.from_bytes(h.digest()[:8], "big")


def _advantage_ci(rate_f: float, rate_h: float, trials: int) -> tuple[float, float]:
    spread = math.sqrt(
        rate_f * (1.0 - rate_f) / trials + rate_h * (1.0 - rate_h) / trials
    )
    eps = abs(rate_f - rate_h)
    return max(0.0, eps - _CI_Z99 * spread), min(1.0, eps + _CI_Z99 * spread)


def estimate_advantage(
    strategy,
    params: WorldParams,
    t: int,
    trials: int,
    seed: int | None = None,
    *,
    use_fast: bool | None = None,
) -> QueryBudgetResult:
    """Monte-Carlo advantage |detect-rate(F) - detect-rate(H)| at budget t.

    Each trial plants a fresh H world and a fresh F world and runs the
    strategy against both with budget t. Reproducible given the seed. The
    vectorized path is used automatically when the strategy supports it;
    pass use_fast=False to force the literal per-query simulation.
    """
    if trials < 1:
        raise InvalidParams("trials must be >= 1")
    if t < 0:
        raise InvalidParams("budget t must be >= 0")
    base_seed = params.seed if seed is None else seed
    fast = getattr(strategy, "has_fast_path", False) if use_fast is None else use_fast
    if fast and not getattr(strategy, "has_fast_path", False):
        raise InvalidParams(f"strategy {strategy.name} has no fast path")

    if fast:
        rng = np.random.default_rng(base_seed)
        rate_f, rate_h = strategy.fast_rates(params, t, trials, rng)
    else:
        hits_f = 0
        hits_h = 0
        for trial in range(trials):
            for label in (WORLD_FABRICATED, WORLD_HONEST):
                world = plant_world(
                    params, label, random.Random(_child_seed(base_seed, trial, label, "plant"))
                )
                oracle = Oracle(
                    world,
                    random.Random(_child_seed(base_seed, trial, label, "noise")),
                    budget=t,
                )
                flagged = strategy.decide(
                    oracle,
                    world.hidden,
                    t,
                    random.Random(_child_seed(base_seed, trial, label, "strategy")),
                )
                if flagged:
                    if label == WORLD_FABRICATED:
                        hits_f += 1
                    else:
                        hits_h += 1
        rate_f = hits_f / trials
        rate_h = hits_h / trials

    ci_low, ci_high = _advantage_ci(rate_f, rate_h, trials)
    return QueryBudgetResult(
        strategy=strategy.name,
        t=t,
        epsilon_hat=abs(rate_f - rate_h),
        rate_fabricated=rate_f,
        rate_honest=rate_h,
        trials=trials,
        seed=base_seed,
        ci_low=ci_low,
        ci_high=ci_high,
    )


def queries_for_advantage(
    strategy,
    params: WorldParams,
    epsilon: float,
    trials: int,
    seed: int | None = None,
    *,
    budget_cap: int = 1 << 20,
    use_fast: bool | None = None,
) -> QueryBudgetResult:
    """Smallest budget t with estimated advantage >= epsilon.

    Probes the Monte-Carlo curve by doubling until the target is crossed and
    then bisects. Every probe at budget t uses a seed derived from (seed, t),
    so the curve is a fixed function and the search is deterministic. Raises
    BudgetExhausted if the cap is hit before the target advantage.
    """
    if not 0.0 < epsilon < 1.0:
        raise InvalidParams("epsilon must be in (0, 1)")
    base_seed = params.seed if seed is None else seed

    def probe(t: int) -> QueryBudgetResult:
        return estimate_advantage(
            strategy, params, t, trials,
            seed=_child_seed(base_seed, "probe", t), use_fast=use_fast,
        )

    low = 0  # advantage at t=0 is 0 < epsilon
    high = 1
    result = probe(high)
    while result.epsilon_hat < epsilon:
        if high >= budget_cap:
            raise BudgetExhausted(
                f"advantage {result.epsilon_hat:.4f} < {epsilon} at budget cap {budget_cap}"
            )
        low = high
        high = min(high * 2, budget_cap)
        result = probe(high)

    while high - low > 1:
        mid = (low + high) // 2
        mid_result = probe(mid)
        if mid_result.epsilon_hat >= epsilon:
            high, result = mid, mid_result
        else:
            low = mid
    return result
