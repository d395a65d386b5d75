"""Cost accounting: exact rational arithmetic and the shipped scenario."""

from fractions import Fraction

import pytest

from factbundle.errors import EmptyClaimSet, UnknownScenario, ZeroHomeCost
from factbundle.vca import (
    SCENARIO_ACME_2026,
    CostModel,
    Population,
    ScenarioScript,
    ScriptStep,
    case_study,
    expected_cost,
    home_script,
    manual_baseline_script,
    manual_sweep_script,
    script_adapter,
    vca_ratio,
)

POP = Population(name="test", budget=100, memory=7)


def table_adapter(table):
    return lambda claim: table[claim]


def test_expected_cost_is_exact():
    """mean(human) + alpha * mean(machine), all Fractions, no rounding."""
    table = {"a": (2, 6), "b": (3, 12)}
    model = CostModel(alpha=Fraction(1, 3))
    report = expected_cost(POP, ["a", "b"], table_adapter(table), model)
    assert report.mean_human_steps == Fraction(5, 2)
    assert report.mean_machine_ms == Fraction(9)
    assert report.expected_cost == Fraction(5, 2) + Fraction(3)
    assert isinstance(report.expected_cost, Fraction)


def test_float_inputs_convert_exactly():
    """Binary floats become exact Fractions, not decimal approximations."""
    model = CostModel(alpha=0.1)
    assert model.alpha == Fraction(0.1)
    assert model.alpha != Fraction(1, 10)
    report = expected_cost(POP, ["x"], lambda _: (0, 10), model)
    assert report.expected_cost == Fraction(0.1) * 10


def test_mixed_denominators_stay_rational():
    table = {"a": (3, Fraction(1, 7)), "b": (4, Fraction(5, 7))}
    model = CostModel(alpha=Fraction(2, 3))
    report = expected_cost(POP, ["a", "b"], table_adapter(table), model)
    # mean human 7/2, mean machine 3/7, expected 7/2 + 2/7 = 53/14
    assert report.expected_cost == Fraction(53, 14)


def test_budget_truncates_and_flags():
    tight = Population(name="tight", budget=5, memory=7)
    report = expected_cost(tight, ["a"], lambda _: (8, 0), CostModel())
    assert report.per_claim[0].truncated is True
    assert report.per_claim[0].human_steps == 5
    assert report.expected_cost == 5

    ok = expected_cost(tight, ["a"], lambda _: (5, 0), CostModel())
    assert ok.per_claim[0].truncated is False


def test_empty_claim_set_rejected():
    with pytest.raises(EmptyClaimSet):
        expected_cost(POP, [], lambda _: (1, 0), CostModel())


def test_ratio_exact_and_zero_home_guard():
    model = CostModel()
    adversary = expected_cost(POP, ["c"], lambda _: (75, 0), model)
    home = expected_cost(POP, ["c"], lambda _: (3, 0), model)
    assert vca_ratio(adversary, home) == Fraction(25)
    zero = expected_cost(POP, ["c"], lambda _: (0, 0), model)
    with pytest.raises(ZeroHomeCost):
        vca_ratio(adversary, zero)


def test_machine_term_scales_linearly():
    """Scaling machine times by c scales exactly the machine term."""
    model = CostModel(alpha=Fraction(3, 11))
    base = expected_cost(POP, ["a"], lambda _: (4, Fraction(7, 5)), model)
    scaled = expected_cost(POP, ["a"], lambda _: (4, Fraction(7, 5) * 9), model)
    assert scaled.expected_cost - 4 == 9 * (base.expected_cost - 4)


def test_parameter_validation():
    with pytest.raises(ValueError):
        Population(name="p", budget=0, memory=7)
    with pytest.raises(ValueError):
        Population(name="p", budget=10, memory=0)
    with pytest.raises(ValueError):
        CostModel(alpha=Fraction(-1, 2))
    with pytest.raises(ValueError):
        ScriptStep("a", "x", -1)


def test_script_totals_and_adapter():
    script = ScenarioScript(
        name="s",
        steps=(ScriptStep("a", "one", 2), ScriptStep("a", "two", 3, Fraction(1, 2))),
    )
    assert script.total_human_steps() == 5
    assert script.total_machine_ms() == Fraction(1, 2)
    assert script_adapter(script)("any-claim") == (5, Fraction(1, 2))


def test_home_script_costs_one_step_per_check():
    for k in (1, 3, 10):
        assert home_script(k).total_human_steps() == k


def test_manual_baseline_totals_seventy_five():
    script = manual_baseline_script()
    assert script.total_human_steps() == 75
    assert [s.human_steps for s in script.steps] == [8, 14, 14, 21, 8, 10]


def test_manual_sweep_is_quadratic():
    """Pairwise cross-referencing of v forgeries costs 6v^2 + 27v + 26."""
    for v in range(1, 17):
        assert manual_sweep_script(v).total_human_steps() == 6 * v * v + 27 * v + 26
    with pytest.raises(ValueError):
        manual_sweep_script(0)


def test_case_study_baseline_ratio():
    """Equipped cost 3 vs manual checklist 75: asymmetry ratio exactly 25."""
    result = case_study(SCENARIO_ACME_2026)
    assert result.home.expected_cost == Fraction(3)
    assert result.adversary.expected_cost == Fraction(75)
    assert result.ratio == Fraction(25)
    assert not any(c.truncated for c in result.home.per_claim)
    assert not any(c.truncated for c in result.adversary.per_claim)


def test_case_study_home_cost_tracks_k():
    for k in (1, 5, 8):
        result = case_study(SCENARIO_ACME_2026, k=k)
        assert result.home.expected_cost == Fraction(k)
        assert result.ratio == Fraction(75, k)


def test_case_study_counts_machine_time_when_weighted():
    """With alpha > 0 the measured verifier time raises the home cost."""
    result = case_study(SCENARIO_ACME_2026, alpha=1)
    assert result.home.mean_machine_ms > 0
    assert result.home.expected_cost > 3
    assert result.adversary.expected_cost == Fraction(75)
    assert 0 < result.ratio < 25


def test_case_study_forgery_sweep():
    for v in (1, 4, 6, 9):
        result = case_study(SCENARIO_ACME_2026, forgeries=v)
        assert result.home.expected_cost == Fraction(3)
        assert result.adversary.expected_cost == 6 * v * v + 27 * v + 26
    assert case_study(SCENARIO_ACME_2026, forgeries=6).adversary.expected_cost == 404


def test_unknown_scenario_rejected():
    with pytest.raises(UnknownScenario):
        case_study("acme-2027")


def test_report_dict_shapes():
    result = case_study(SCENARIO_ACME_2026)
    payload = result.as_dict()
    assert payload["home_cost"] == 3
    assert payload["adversary_cost"] == 75
    assert payload["ratio"] == 25
    assert payload["ratio_exact"] == "25"
    assert payload["populations"]["home"]["equipped"] is True
    assert payload["procedures"]["adversary"]["total_human_steps"] == 75
    home_report = payload["home"]
    assert home_report["sample_size"] == 1
    assert isinstance(home_report["expected_cost_exact"], str)
