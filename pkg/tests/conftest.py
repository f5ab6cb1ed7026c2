import json
from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"

ACCEPTANCE_RESULTS: dict[int, tuple[str, bool]] = {}


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def signed_chsh_measure():
    from epr_game_lab.lhv_engine import SignedMeasure

    data = json.loads((FIXTURES / "signed_chsh_measure.json").read_text())
    return SignedMeasure(data["measure"]["m"])


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        desc, ok = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n:>2}: {desc}")
