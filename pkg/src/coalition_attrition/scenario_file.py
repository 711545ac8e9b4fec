"""Scenario documents (YAML or JSON) and their validation.

Structural problems (unknown keys, wrong types, non-finite numbers) raise
:class:`SchemaError` with the offending field and, for YAML input, its line.
Documents that parse but break a model rule raise :class:`InvariantViolation`.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .coopgame import CharacteristicGame, EnduranceSpec
from .equilibrium.types import SolverConfig
from .errors import GameError, InvariantViolation, SchemaError
from .model import Coalition, CostKind, EffortProfile, PlayerParams, Scenario, SubCoalition


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False, strict=False)


class PlayerDoc(_Strict):
    id: str
    a: float = 1.0
    c: float = 1.0
    cost: Literal["quadratic", "linear", "power"] = "quadratic"
    exponent: float | None = None


class BranchDoc(_Strict):
    id: str
    members: list[str]
    reward: float


class CoalitionDoc(_Strict):
    id: str
    members: list[str]
    reward: float
    sub_coalitions: list[BranchDoc] = Field(default_factory=list)


class EnduranceDoc(_Strict):
    kind: Literal["weighted-sum", "variance", "weakest-link"] = "weighted-sum"
    weights: list[float] | None = None
    gamma: float = 0.0


class SolverDoc(_Strict):
    max_iter: int | None = None
    tol: float | None = None
    damping: float | None = None
    grid_size: int | None = None
    t_max: float | None = None
    seed: int | None = None
    fp_rounds: int | None = None
    mixed_tol: float | None = None
    check_every: int | None = None
    mc_draws: int | None = None


class ScenarioDoc(_Strict):
    players: list[PlayerDoc]
    coalitions: list[CoalitionDoc]
    endurance: EnduranceDoc | None = None
    solver: SolverDoc | None = None
    efforts: dict[str, float] | None = None


class GameDoc(_Strict):
    players: list[str]
    values: dict[str, float]


@dataclass(frozen=True)
class ParsedScenario:
    scenario: Scenario
    config: SolverConfig
    endurance: EnduranceSpec
    efforts: EffortProfile | None


def _load_document(path: Path):
    text = path.read_text(encoding="utf-8")
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{path}:{mark.line + 1}" if mark is not None else str(path)
        raise SchemaError(f"{where}: malformed document: {getattr(exc, 'problem', exc)}") from None
    if not isinstance(data, dict):
        raise SchemaError(f"{path}: top level must be a mapping")
    return data, node


def _line_of(node, loc) -> int | None:
    """1-based line of the YAML node at pydantic location ``loc``."""
    line = node.start_mark.line + 1 if node is not None else None
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            match = next((v for k, v in node.value if k.value == key), None)
            if match is None:
                match = next((k for k, _ in node.value if k.value == key), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            match = node.value[key]
        else:
            match = None
        if match is None:
            break
        node = match
        line = node.start_mark.line + 1
    return line


def _schema_error(path: Path, node, exc: ValidationError) -> SchemaError:
    err = exc.errors()[0]
    loc = err["loc"]
    field = ".".join(str(part) for part in loc) or "<root>"
    line = _line_of(node, loc)
    where = f"{path}:{line}" if line is not None else str(path)
    extra = f" (and {exc.error_count() - 1} more)" if exc.error_count() > 1 else ""
    return SchemaError(f"{where}: field '{field}': {err['msg']}{extra}")


def _build(doc: ScenarioDoc) -> ParsedScenario:
    players: dict[str, PlayerParams] = {}
    for p in doc.players:
        if p.id in players:
            raise InvariantViolation(f"player {p.id!r} declared twice")
        if p.exponent is not None and p.cost != "power":
            raise InvariantViolation(f"player {p.id!r}: 'exponent' only applies to cost 'power'")
        exponent = p.exponent if p.exponent is not None else 2.0
        players[p.id] = PlayerParams(p.id, p.a, p.c, CostKind(p.cost), exponent)

    coalitions = []
    for c in doc.coalitions:
        unknown = [m for m in c.members if m not in players]
        if unknown:
            raise InvariantViolation(f"coalition {c.id!r} lists undeclared players {unknown}")
        branches = tuple(SubCoalition(b.id, tuple(b.members), b.reward) for b in c.sub_coalitions)
        coalitions.append(Coalition(c.id, tuple(players[m] for m in c.members), c.reward, branches))
    scenario = Scenario(tuple(coalitions))
    unassigned = [pid for pid in players if pid not in scenario.player_ids]
    if unassigned:
        raise InvariantViolation(
            f"players {unassigned} belong to no coalition (coalitions must cover every player: ⋃ S_k = N)"
        )

    solver = {k: v for k, v in (doc.solver.model_dump() if doc.solver else {}).items() if v is not None}
    config = SolverConfig(**solver)
    e = doc.endurance or EnduranceDoc()
    endurance = EnduranceSpec(e.kind, tuple(e.weights) if e.weights is not None else None, e.gamma)
    efforts = None
    if doc.efforts is not None:
        efforts = EffortProfile(doc.efforts)
        efforts.check_covers(scenario)
    return ParsedScenario(scenario, config, endurance, efforts)


def parse_scenario(path: str | Path) -> ParsedScenario:
    """Load and fully validate a scenario file.

    Raises ``FileNotFoundError``, :class:`SchemaError` or
    :class:`InvariantViolation`.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"scenario file not found: {path}")
    data, node = _load_document(path)
    try:
        doc = ScenarioDoc.model_validate(data)
    except ValidationError as exc:
        raise _schema_error(path, node, exc) from None
    try:
        return _build(doc)
    except InvariantViolation:
        raise
    except GameError as exc:
        # every semantic failure of a well-formed document is an invariant problem
        raise InvariantViolation(str(exc)) from None


def parse_game(path: str | Path) -> tuple[list[str], CharacteristicGame]:
    """Load a characteristic-function game.

    ``values`` keys are comma-separated player names; ``""`` is the empty
    coalition and may be omitted.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"game file not found: {path}")
    data, node = _load_document(path)
    try:
        doc = GameDoc.model_validate(data)
    except ValidationError as exc:
        raise _schema_error(path, node, exc) from None
    index = {name: i for i, name in enumerate(doc.players)}
    if len(index) != len(doc.players):
        raise InvariantViolation("duplicate player names")
    mapping = {}
    for key, value in doc.values.items():
        names = [part.strip() for part in key.split(",") if part.strip()]
        unknown = [n for n in names if n not in index]
        if unknown:
            raise InvariantViolation(f"subset {key!r} names unknown players {unknown}")
        members = frozenset(index[n] for n in names)
        if members in mapping:
            raise InvariantViolation(f"subset {key!r} given twice")
        mapping[members] = value
    if mapping.get(frozenset(), 0.0) != 0.0:
        raise InvariantViolation("the empty coalition must have value 0")
    mapping.pop(frozenset(), None)
    try:
        return doc.players, CharacteristicGame.from_mapping(len(doc.players), mapping)
    except GameError as exc:
        raise InvariantViolation(str(exc)) from None
