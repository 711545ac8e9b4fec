import pytest

from coalition_attrition.casestudy import (
    DEFAULT_COALITIONS,
    CounterfactualSpec,
    Lever,
    apply_counterfactual,
    build_scenario,
    counterfactual_run,
    published_estimates,
)
from coalition_attrition.equilibrium import solve_two_layer
from coalition_attrition.errors import InvariantViolation, UnknownSelector
from coalition_attrition.model import Coalition, EffortProfile, PlayerParams, Scenario, coalition_power


def toy():
    sc = Scenario(
        (
            Coalition("n", (PlayerParams("x1", 1.0, 1.0), PlayerParams("x2", 2.0, 1.5)), 4.0),
            Coalition("s", (PlayerParams("y1", 1.0, 1.0), PlayerParams("y2", 0.5, 0.5)), 3.0),
        )
    )
    return sc, EffortProfile({"x1": 0.3, "x2": 0.2, "y1": 0.5, "y2": 0.1})


def test_effectiveness_homogeneity():
    sc, pr = toy()
    res = counterfactual_run(sc, pr, CounterfactualSpec("effectiveness", (), 2.0))
    assert all(abs(d) <= 1e-10 for d in res.deltas["shares"].values())
    assert all(abs(d) <= 1e-10 for d in res.deltas["win_probabilities"].values())


def test_cost_increase_lowers_effort():
    sc, pr = toy()
    res = counterfactual_run(sc, pr, CounterfactualSpec(Lever.COST, ("y1",), 4.0))
    assert res.perturbed.efforts["y1"] <= res.baseline.efforts["y1"] + 1e-9


def test_reward_increase_raises_power():
    sc, pr = toy()
    res = counterfactual_run(sc, pr, CounterfactualSpec(Lever.REWARD, ("s",), 10.0))
    before = res.baseline.efforts["y1"] * 1.0 + res.baseline.efforts["y2"] * 0.5
    after = res.perturbed.efforts["y1"] * 1.0 + res.perturbed.efforts["y2"] * 0.5
    assert after >= before - 1e-9


def test_unit_multiplier_zero_deltas():
    sc, pr = toy()
    for lever in Lever:
        res = counterfactual_run(sc, pr, CounterfactualSpec(lever, (), 1.0))
        for group in res.deltas.values():
            assert all(abs(d) <= 1e-9 for d in group.values())
        assert not res.winner_changed


def test_resilience_changes_stage_one():
    case = build_scenario(published_estimates(), DEFAULT_COALITIONS)
    res = counterfactual_run(case.scenario, case.profile, CounterfactualSpec("resilience", ("traditional",), 3.0))
    assert res.baseline.stage_one.chosen == "crypto"
    assert res.perturbed.stage_one.chosen == "traditional"
    assert res.winner_changed
    assert res.deltas["endurance"]["crypto"] == 0.0


def test_apply_selectors():
    sc, pr = toy()
    new, _ = apply_counterfactual(sc, pr, CounterfactualSpec("cost", ("x2",), 2.0))
    assert new.player("x2").c == 3.0 and new.player("x1").c == 1.0
    new, _ = apply_counterfactual(sc, pr, CounterfactualSpec("effectiveness", ("n",), 3.0))
    assert [p.a for p in new.coalition("n").members] == [3.0, 6.0]
    _, new_pr = apply_counterfactual(sc, pr, CounterfactualSpec("resilience", ("y2",), 2.0))
    assert new_pr["y2"] == 0.2 and new_pr["y1"] == 0.5


def test_errors():
    sc, pr = toy()
    with pytest.raises(UnknownSelector):
        counterfactual_run(sc, pr, CounterfactualSpec("cost", ("nobody",), 2.0))
    with pytest.raises(UnknownSelector):
        apply_counterfactual(sc, pr, CounterfactualSpec("reward", ("x1",), 2.0))
    with pytest.raises(InvariantViolation):
        CounterfactualSpec("cost", (), 0.0)
    with pytest.raises(ValueError):
        CounterfactualSpec("height", (), 2.0)


def test_to_dict_roundtrip_keys():
    sc, pr = toy()
    d = counterfactual_run(sc, pr, CounterfactualSpec("reward", ("n",), 2.0)).to_dict()
    assert set(d) == {"baseline", "perturbed", "deltas", "winner_changed"}
    assert set(d["deltas"]) == {"efforts", "win_probabilities", "shares", "endurance"}


def test_power_helper_consistent():
    sc, _ = toy()
    reports = solve_two_layer(sc)
    pr = EffortProfile({p: t for r in reports.values() for p, t in r.efforts.as_dict().items()})
    total = sum(coalition_power(pr, c) for c in sc.coalitions)
    assert reports["n"].win_probability == pytest.approx(coalition_power(pr, sc.coalition("n")) / total)
