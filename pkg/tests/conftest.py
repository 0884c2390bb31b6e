from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hsrm import ScientistProfile, SyntheticSpec, fit_cohort, generate_cohort  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"
COHORT_SEED = 1

# (criterion, passed, detail) rows collected by test_acceptance
ACCEPTANCE: list[tuple[str, bool, str]] = []


def record(criterion: str, passed: bool, detail: str = "") -> None:
    ACCEPTANCE.append((criterion, passed, detail))
    print(f"{'PASS' if passed else 'FAIL'} {criterion} {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(ACCEPTANCE, key=lambda r: int(r[0].split()[0][2:])):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} {criterion}  {detail}")


@pytest.fixture(scope="session")
def h14_profile() -> ScientistProfile:
    doc = json.loads((FIXTURES / "h14_profile.json").read_text())
    entry = doc["scientists"][0]
    return ScientistProfile(entry["id"], tuple(entry["citations"]))


@pytest.fixture(scope="session")
def synthetic_cohort() -> list[ScientistProfile]:
    return generate_cohort(SyntheticSpec(), COHORT_SEED)


@pytest.fixture(scope="session")
def synthetic_outcomes(synthetic_cohort):
    return fit_cohort(synthetic_cohort)
