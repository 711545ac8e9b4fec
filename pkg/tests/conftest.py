from pathlib import Path

import pytest

from coalition_attrition.model import Coalition, CostKind, PlayerParams, Scenario

FIXTURES = Path(__file__).with_name("fixtures")


def contest(n=2, reward=1.0, c=1.0, a=None, cid="k1", prefix="p", cost_kind=CostKind.QUADRATIC):
    a = a or [1.0] * n
    cs = c if isinstance(c, (list, tuple)) else [c] * n
    players = tuple(PlayerParams(f"{prefix}{i + 1}", a[i], cs[i], cost_kind) for i in range(n))
    return Coalition(cid, players, reward)


def single(n=2, reward=1.0, c=1.0, a=None, **kw):
    return Scenario((contest(n, reward, c, a, **kw),))


@pytest.fixture
def fixtures_dir():
    return FIXTURES


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
