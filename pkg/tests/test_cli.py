import io
import json
from importlib import resources

import jsonschema
import pytest

from coalition_attrition.cli import run

from conftest import FIXTURES

SCHEMA = json.loads(resources.files("coalition_attrition").joinpath("schemas/report.schema.json").read_text())


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], stdout=out, stderr=err)
    report = json.loads(out.getvalue()) if out.getvalue() else None
    if report is not None:
        jsonschema.validate(report, SCHEMA)
    return code, report, err.getvalue()


def test_solve_symmetric():
    code, report, _ = call("solve", FIXTURES / "symmetric2.yaml")
    assert code == 0
    efforts = report["payload"]["coalitions"]["k1"]["efforts"]
    assert efforts["p1"] == pytest.approx(0.353553, abs=1e-6)
    assert report["payload"]["choices"]["p1"]["choice"] == "k1"


def test_payload_deterministic():
    _, a, _ = call("solve", FIXTURES / "two_coalitions.yaml", "--seed", 5)
    _, b, _ = call("solve", FIXTURES / "two_coalitions.yaml", "--seed", 5)
    assert json.dumps(a["payload"]) == json.dumps(b["payload"])
    assert a["config"]["seed"] == 5


def test_two_layer_and_payoff_flag():
    code, exp, _ = call("two-layer", FIXTURES / "two_coalitions.yaml")
    assert code == 0
    probs = [c["win_probability"] for c in exp["payload"]["coalitions"].values()]
    assert sum(probs) == pytest.approx(1.0, abs=1e-12)
    _, cond, _ = call("two-layer", FIXTURES / "two_coalitions.yaml", "--payoff", "conditional")
    assert cond["config"]["payoff"] == "conditional"
    assert exp["payload"]["choices"] != cond["payload"]["choices"]


def test_mixed(tmp_path):
    code, report, _ = call("mixed", FIXTURES / "mixed3.yaml", "--out-dir", tmp_path)
    assert code == 0
    assert report["payload"]["coalitions"]["k1"]["exploitability"] <= 1e-3
    assert (tmp_path / "mixed_strategies.csv").read_text().startswith("coalition,player,effort,prob\n")


def test_mixed_nonconvergence_exit_1():
    code, report, _ = call("mixed", FIXTURES / "mixed3.yaml", "--rounds", 3)
    assert code == 1
    assert report["exit_code"] == 1 and report["warnings"]


def test_solve_iteration_cap_exit_1():
    code, report, _ = call("solve", FIXTURES / "symmetric2.yaml", "--max-iter", 2)
    assert code == 1
    assert report["payload"]["coalitions"]["k1"]["converged"] is False


def test_woa_samples_identical(tmp_path):
    args = ("woa", "--prize", 1, "--samples", 1000, "--seed", 7)
    call(*args, "--out-dir", tmp_path / "a")
    call(*args, "--out-dir", tmp_path / "b")
    first = (tmp_path / "a" / "woa_samples.csv").read_bytes()
    assert first == (tmp_path / "b" / "woa_samples.csv").read_bytes()
    assert len(first.splitlines()) == 1001


def test_woa_fp():
    code, report, _ = call("woa", "--prize", 1, "--samples", 10, "--fp", "--grid", 201, "--t-max", 5)
    assert code == 0
    eq = report["payload"]["equilibrium"]
    assert eq["cdf_sup_distance"] <= 0.05 and eq["exploitability"] <= 1e-3


def test_shapley_and_core():
    code, report, _ = call("shapley", FIXTURES / "game2.yaml")
    assert code == 0 and report["payload"]["shapley"] == {"alice": 1.5, "bob": 2.5}
    code, report, _ = call("core", FIXTURES / "game3.yaml", "--allocation", "0.3,0.3,0.4")
    assert code == 0 and report["payload"]["in_core"] is False
    assert report["payload"]["worst_violating_subset"] == ["x", "y"]


def test_casestudy_files_byte_identical(tmp_path):
    code, report, _ = call("casestudy", "--out-dir", tmp_path / "a")
    assert code == 0
    call("casestudy", "--out-dir", tmp_path / "b")
    for name in ("figure1_sharpe.csv", "figure2_endurance.csv", "figure3_shares.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    header, *rows = (tmp_path / "a" / "figure3_shares.csv").read_text().splitlines()
    assert header == "year,bitcoin,ethereum,solana"
    assert rows[0].endswith(",")  # no solana share in 2018
    assert any("solana" in w for w in report["warnings"])


def test_casestudy_published():
    code, report, _ = call("casestudy", "--published")
    assert code == 0
    p = report["payload"]
    assert p["stage_one"]["chosen"] == "crypto"
    assert p["ranking"] == ["brent", "solana", "bitcoin", "ethereum", "copper", "gold"]
    assert "yearly_shares" not in p


def test_casestudy_variance_endurance():
    code, report, _ = call("casestudy", "--published", "--endurance", "variance", "--gamma", "2")
    assert code == 0 and report["payload"]["stage_one"]["endurance_kind"] == "variance"


def test_counterfactual_scenario():
    code, report, _ = call(
        "counterfactual", FIXTURES / "two_coalitions.yaml", "--target", "cost", "--select", "p1", "--multiplier", 2
    )
    assert code == 0
    assert report["payload"]["deltas"]["efforts"]["p1"] < 0


def test_counterfactual_prices():
    code, report, _ = call("counterfactual", "--published", "--target", "resilience",
                           "--select", "traditional", "--multiplier", 3)
    assert code == 0 and report["payload"]["winner_changed"] is True


@pytest.mark.parametrize(
    "argv,expected",
    [
        (["solve", FIXTURES / "missing.yaml"], 2),
        (["casestudy", "--data-dir", FIXTURES / "nowhere"], 2),
        (["solve", FIXTURES / "malformed.yaml"], 3),
        (["solve", FIXTURES / "unknown_field.yaml"], 3),
        (["solve", FIXTURES / "nonfinite.yaml"], 3),
        (["solve", FIXTURES / "overlap.yaml"], 4),
        (["core", FIXTURES / "game2.yaml", "--allocation", "1,2,3"], 64),
        (["counterfactual", FIXTURES / "two_coalitions.yaml", "--target", "cost", "--select", "zz",
          "--multiplier", "2"], 4),
        (["frobnicate"], 64),
        ([], 64),
        (["solve"], 64),
        (["solve", FIXTURES / "symmetric2.yaml", "--payoff", "sideways"], 64),
        (["casestudy", "--gamma", "1"], 64),
        (["casestudy", "--endurance", "weakest-link", "--gamma", "1"], 64),
        (["casestudy", "--published", "--data-dir", FIXTURES], 64),
        (["counterfactual", FIXTURES / "two_coalitions.yaml", "--data-dir", FIXTURES, "--target", "cost",
          "--multiplier", "2"], 64),
        (["woa", "--prize", "0"], 4),
        (["woa", "--prize", "1", "--samples", "0"], 64),
        (["solve", FIXTURES / "symmetric2.yaml", "--tol", "-1"], 4),
    ],
)
def test_exit_codes(argv, expected):
    code, report, err = call(*argv)
    assert code == expected, err
    assert report is None
    assert err


def test_bad_csv_exit_3(tmp_path):
    for asset in ("a", "b"):
        (tmp_path / f"{asset}.csv").write_text("date,close\n2021-01-01,1\n2021-01-01,2\n")
    code, _, err = call("casestudy", "--data-dir", tmp_path, "--coalition", "k=a,b")
    assert code == 3 and "duplicate date" in err
