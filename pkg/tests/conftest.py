import datetime as dt

import pytest

from shockflow.antifragility import STATEMENT_HEADER
from shockflow.fund_flow import FLOW_HEADER


def write_flow(path, rows):
    lines = [",".join(FLOW_HEADER)] + [",".join(str(c) for c in r) for r in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def write_statements(path, rows):
    lines = [",".join(STATEMENT_HEADER)] + [",".join(str(c) for c in r) for r in rows]
    path.write_text("\n".join(lines) + "\n")
    return path


def daily_rows(n, start=dt.date(2020, 1, 1), net=lambda i: (i % 7) - 3):
    """``n`` consecutive days whose net flow is ``net(i)``."""
    rows = []
    for i in range(n):
        v = net(i)
        rows.append(((start + dt.timedelta(days=i)).isoformat(),
                     max(v, 0), max(-v, 0), 1, 1))
    return rows


@pytest.fixture
def flow_file(tmp_path):
    return write_flow(tmp_path / "flow.csv", [
        ("2020-03-02", 10, 4, 3, 2),
        ("2020-03-03", 0, 5, 0, 5),
        ("2020-03-04", 2, 0, 0, 0),
    ])


# assets (50, 30, 40, 20), liabilities (40, 30, 30), expenses (40, 20, 30, 10) -> phi = 0.4
QUALITY_ROW = ("acme", 50, 30, 40, 20, 40, 30, 30, 40, 20, 30, 10)


@pytest.fixture
def statements_file(tmp_path):
    return write_statements(tmp_path / "statements.csv", [
        QUALITY_ROW,
        ("balanced", 10, 10, 10, 10, 20, 10, 10, 5, 5, 5, 5),
    ])


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
