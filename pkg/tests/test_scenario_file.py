import pytest

from coalition_attrition.coopgame import EnduranceKind
from coalition_attrition.errors import InvariantViolation, SchemaError
from coalition_attrition.model import CostKind
from coalition_attrition.scenario_file import parse_game, parse_scenario

from conftest import FIXTURES


def test_minimal():
    parsed = parse_scenario(FIXTURES / "symmetric2.yaml")
    assert len(parsed.scenario.players) == 2
    assert parsed.efforts is None
    assert parsed.config.tol == 1e-10


def test_full_document():
    parsed = parse_scenario(FIXTURES / "two_coalitions.yaml")
    assert parsed.scenario.player("p4").cost_kind is CostKind.LINEAR
    assert parsed.config.grid_size == 41
    assert parsed.endurance.kind is EnduranceKind.WEIGHTED_SUM


def test_json_accepted(tmp_path):
    p = tmp_path / "s.json"
    p.write_text('{"players": [{"id": "a"}], "coalitions": [{"id": "k", "members": ["a"], "reward": 2}]}')
    assert parse_scenario(p).scenario.coalition("k").reward == 2.0


def test_overlap():
    with pytest.raises(InvariantViolation, match="S_i ∩ S_j = ∅"):
        parse_scenario(FIXTURES / "overlap.yaml")


def test_malformed():
    with pytest.raises(SchemaError, match=r"malformed.yaml:\d+"):
        parse_scenario(FIXTURES / "malformed.yaml")


def test_unknown_field_line():
    with pytest.raises(SchemaError, match=r"unknown_field.yaml:4: field 'players.0.colour'"):
        parse_scenario(FIXTURES / "unknown_field.yaml")


def test_nonfinite():
    with pytest.raises(SchemaError, match="players.0.a"):
        parse_scenario(FIXTURES / "nonfinite.yaml")


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        parse_scenario(FIXTURES / "does_not_exist.yaml")


@pytest.mark.parametrize(
    "body,match",
    [
        ("players: [{id: a}]\ncoalitions: []\n", "no coalitions"),
        ("players: [{id: a}, {id: b}]\ncoalitions: [{id: k, members: [a], reward: 1}]\n", "belong to no coalition"),
        ("players: [{id: a, a: -1}]\ncoalitions: [{id: k, members: [a], reward: 1}]\n", "a"),
        ("players: [{id: a}]\ncoalitions: [{id: k, members: [b], reward: 1}]\n", "undeclared"),
        ("players: [{id: a, exponent: 3}]\ncoalitions: [{id: k, members: [a], reward: 1}]\n", "exponent"),
        ("players: [{id: a}, {id: a}]\ncoalitions: [{id: k, members: [a], reward: 1}]\n", "twice"),
        (
            "players: [{id: a}]\ncoalitions: [{id: k, members: [a], reward: 1}]\nefforts: {a: 1, b: 2}\n",
            "b",
        ),
    ],
)
def test_invariants(tmp_path, body, match):
    p = tmp_path / "s.yaml"
    p.write_text(body)
    with pytest.raises(InvariantViolation, match=match):
        parse_scenario(p)


def test_solver_block_validated(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text("players: [{id: a}]\ncoalitions: [{id: k, members: [a], reward: 1}]\nsolver: {damping: 2}\n")
    with pytest.raises(InvariantViolation):
        parse_scenario(p)


def test_top_level_must_be_mapping(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text("- 1\n- 2\n")
    with pytest.raises(SchemaError):
        parse_scenario(p)


def test_game_file():
    names, game = parse_game(FIXTURES / "game2.yaml")
    assert names == ["alice", "bob"]
    assert game.v.tolist() == [0.0, 1.0, 2.0, 4.0]


def test_game_missing_subset(tmp_path):
    p = tmp_path / "g.yaml"
    p.write_text('players: [a, b]\nvalues: {"a": 1, "a,b": 2}\n')
    with pytest.raises(InvariantViolation):
        parse_game(p)


def test_readme_example_matches_fixture():
    import re

    readme = (FIXTURES.parent.parent / "README.md").read_text()
    block = re.findall(r"```yaml\n(.*?)```", readme, re.S)[0]
    assert block == (FIXTURES / "documented.yaml").read_text()
    parsed = parse_scenario(FIXTURES / "documented.yaml")
    assert parsed.scenario.player("p3").exponent == 3.0
    assert parsed.scenario.coalition("north").branch("left").reward == 1.0
    assert parsed.endurance.gamma == 0.5
