import datetime as dt
import math

import numpy as np
import pytest

from coalition_attrition.casestudy import (
    DEFAULT_COALITIONS,
    EFFORT_FLOOR,
    FIXTURE_DIR,
    PUBLISHED_MOMENTS,
    PriceSeries,
    ResilienceEstimate,
    ReturnStats,
    build_scenario,
    compute_returns,
    estimate_resilience,
    load_price_csv,
    return_stats,
    sharpe_resilience,
    published_estimates,
    two_stage_decision,
    yearly_share_series,
)
from coalition_attrition.coopgame import EnduranceKind, EnduranceSpec
from coalition_attrition.errors import (
    DuplicateAsset,
    EmptyYear,
    InsufficientData,
    InvariantViolation,
    SchemaError,
    UnassignedAsset,
    ZeroVolatility,
)

RANKING = ["brent", "solana", "bitcoin", "ethereum", "copper", "gold"]


def series(asset, prices, start=dt.date(2021, 1, 1)):
    return PriceSeries(asset, tuple((start + dt.timedelta(days=i), p) for i, p in enumerate(prices)))


def est(asset, mean, std):
    stats = ReturnStats(mean, std, 100)
    return ResilienceEstimate(asset, mean / std, (dt.date(2020, 1, 1), dt.date(2020, 12, 31)), stats)


class TestReturns:
    def test_simple(self):
        assert compute_returns(series("x", [100.0, 110.0])) == [pytest.approx(0.10, abs=1e-15)]

    def test_flat(self):
        assert compute_returns(series("x", [5.0] * 4)) == [0.0, 0.0, 0.0]

    def test_log(self):
        assert compute_returns(series("x", [1.0, math.e]), "log") == [pytest.approx(1.0)]

    def test_single_observation(self):
        with pytest.raises(InsufficientData):
            compute_returns(series("x", [1.0]))

    def test_stats(self):
        s = return_stats([0.1, -0.1])
        assert s.mean == 0.0
        assert s.std == pytest.approx(math.sqrt(0.02), abs=1e-15)
        assert return_stats([0.01] * 5).std == 0.0
        with pytest.raises(InsufficientData):
            return_stats([])
        with pytest.raises(InsufficientData):
            return_stats([0.1])

    def test_population_std(self):
        assert return_stats([0.1, -0.1], ddof=0).std == pytest.approx(0.1)


class TestSharpe:
    def test_published_rows(self):
        assert sharpe_resilience(ReturnStats(0.0093, 0.0919, None)) == pytest.approx(0.101197, abs=1e-6)
        assert sharpe_resilience(ReturnStats(0.0043, 0.0535, None)) == pytest.approx(0.080374, abs=1e-6)
        assert sharpe_resilience(ReturnStats(0.0, 0.05, None)) == 0.0

    def test_zero_volatility(self):
        with pytest.raises(ZeroVolatility):
            sharpe_resilience(ReturnStats(0.01, 0.0, 3))

    def test_printed_ratios_within_tolerance(self):
        for asset, (mean, std, printed) in PUBLISHED_MOMENTS.items():
            assert abs(mean / std - printed) <= 0.003, asset

    def test_ranking(self):
        computed = sorted(published_estimates("computed"), key=lambda e: e.sharpe, reverse=True)
        printed = sorted(published_estimates("printed"), key=lambda e: e.sharpe, reverse=True)
        assert [e.asset_id for e in computed] == RANKING
        assert [e.asset_id for e in printed] == RANKING


class TestPriceFiles:
    def test_fixture_files_load(self):
        for asset in DEFAULT_COALITIONS:
            s = load_price_csv(FIXTURE_DIR / f"{asset}.csv")
            assert s.asset_id == asset and len(s) > 100

    def test_unsorted_rows(self, tmp_path):
        p = tmp_path / "x.csv"
        p.write_text("date,close\n2021-01-03,3\n2021-01-01,1\n2021-01-02,2\n")
        assert load_price_csv(p).prices == [1.0, 2.0, 3.0]

    @pytest.mark.parametrize(
        "body,line",
        [
            ("date,price\n2021-01-01,1\n", 1),
            ("date,close\n2021-01-01,1\n2021-13-01,2\n", 3),
            ("date,close\n2021-01-01,1\n2021-01-01,2\n", 3),
            ("date,close\n2021-01-01,-1\n", 2),
            ("date,close\n2021-01-01,nan\n", 2),
            ("date,close\n2021-01-01,1,2\n", 2),
        ],
    )
    def test_bad_rows(self, tmp_path, body, line):
        p = tmp_path / "bad.csv"
        p.write_text(body)
        with pytest.raises(SchemaError, match=f"bad.csv:{line}:"):
            load_price_csv(p)

    def test_series_invariants(self):
        with pytest.raises(InvariantViolation):
            PriceSeries("x", ((dt.date(2021, 1, 2), 1.0), (dt.date(2021, 1, 1), 1.0)))
        with pytest.raises(InvariantViolation):
            PriceSeries("x", ((dt.date(2021, 1, 1), 0.0),))

    def test_window(self):
        s = series("x", [1, 2, 3, 4, 5])
        w = s.window(dt.date(2021, 1, 2), dt.date(2021, 1, 4))
        assert w.prices == [2.0, 3.0, 4.0]


class TestBuildScenario:
    def test_published_split(self):
        case = build_scenario(published_estimates(), DEFAULT_COALITIONS)
        assert [c.id for c in case.scenario.coalitions] == ["crypto", "traditional"]
        assert all(len(c.members) == 3 for c in case.scenario.coalitions)

    def test_uniform(self):
        case = build_scenario(published_estimates(), DEFAULT_COALITIONS, "uniform")
        for c in case.scenario.coalitions:
            assert len({p.a for p in c.members}) == 1

    def test_mean_return_weights_normalized(self):
        case = build_scenario(published_estimates(), DEFAULT_COALITIONS)
        for c in case.scenario.coalitions:
            assert math.fsum(p.a for p in c.members) == pytest.approx(1.0, abs=1e-15)

    def test_negative_sharpe_clamped(self):
        case = build_scenario([est("a", 0.01, 0.1), est("b", -0.01, 0.1)], {"a": "k", "b": "k"})
        assert case.clamped == ("b",)
        assert case.profile["b"] == EFFORT_FLOOR

    def test_errors(self):
        with pytest.raises(UnassignedAsset):
            build_scenario([est("a", 0.01, 0.1)], {"b": "k"})
        with pytest.raises(DuplicateAsset):
            build_scenario([est("a", 0.01, 0.1), est("a", 0.02, 0.1)], {"a": "k"})


class TestTwoStage:
    def test_published_values(self):
        case = build_scenario(published_estimates(), DEFAULT_COALITIONS)
        d = two_stage_decision(case.scenario, case.profile)
        assert d.endurance["crypto"] == pytest.approx(0.066067, abs=1e-6)
        assert d.endurance["traditional"] == pytest.approx(0.055867, abs=1e-6)
        assert d.chosen == "crypto"
        assert abs(math.fsum(d.shares.values()) - 1) <= 1e-12

    def test_identical_coalitions_tie(self):
        ests = [est("a", 0.01, 0.1), est("b", 0.01, 0.1)]
        case = build_scenario(ests, {"a": "first", "b": "second"})
        assert two_stage_decision(case.scenario, case.profile).chosen == "first"

    @pytest.mark.parametrize("k", [0.5, 3.0, 1e3])
    def test_rescaling_invariance(self, k):
        case = build_scenario(published_estimates(), DEFAULT_COALITIONS)
        scaled = type(case.profile)({p: t * k for p, t in case.profile.as_dict().items()})
        for kind in EnduranceKind:
            spec = EnduranceSpec(kind)
            assert two_stage_decision(case.scenario, case.profile, spec).chosen == (
                two_stage_decision(case.scenario, scaled, spec).chosen
            )


def fixture_series():
    return {a: load_price_csv(FIXTURE_DIR / f"{a}.csv") for a in DEFAULT_COALITIONS}


class TestYearlyShares:
    def test_solana_entry(self):
        ys = yearly_share_series(fixture_series(), range(2018, 2024), DEFAULT_COALITIONS, "crypto")
        for year in (2018, 2019):
            assert "solana" not in ys.shares[year]
            assert ys.excluded[year] == ["solana"]
            assert abs(ys.shares[year]["bitcoin"] + ys.shares[year]["ethereum"] - 1) <= 1e-12
        for year in range(2020, 2024):
            assert "solana" in ys.shares[year]
        for shares in ys.shares.values():
            assert abs(math.fsum(shares.values()) - 1) <= 1e-12

    def test_only_positive_asset_dominates(self):
        up = series("up", [100 * (1.01 + 0.002 * (-1) ** i) ** i for i in range(40)])
        down1 = series("d1", [100 * 0.99**i * (1 + 0.001 * (-1) ** i) for i in range(40)])
        down2 = series("d2", [100 * 0.98**i * (1 + 0.001 * (-1) ** i) for i in range(40)])
        mapping = {"up": "k", "d1": "k", "d2": "k"}
        ys = yearly_share_series({"up": up, "d1": down1, "d2": down2}, [2021], mapping, "k")
        assert ys.shares[2021]["up"] > 1 - 1e-6
        assert set(ys.clamped[2021]) == {"d1", "d2"}

    def test_identical_series_equal_shares(self):
        rng = np.random.default_rng(3)
        prices = list(100 * np.cumprod(1 + rng.normal(0.001, 0.01, 100)))
        data = {a: series(a, prices) for a in ("x", "y", "z")}
        ys = yearly_share_series(data, [2021], {a: "k" for a in data}, "k", "uniform")
        assert all(v == pytest.approx(1 / 3, abs=1e-15) for v in ys.shares[2021].values())

    def test_empty_year(self):
        with pytest.raises(EmptyYear):
            yearly_share_series(fixture_series(), [2010], DEFAULT_COALITIONS, "crypto")


def test_fixture_estimates_deterministic():
    a = estimate_resilience(load_price_csv(FIXTURE_DIR / "brent.csv"))
    b = estimate_resilience(load_price_csv(FIXTURE_DIR / "brent.csv"))
    assert a == b
