from pathlib import Path

import numpy as np
import pytest

FIXTURES = Path(__file__).parent / "fixtures"

# (criterion number, passed, message), filled by tests/test_acceptance.py
ACCEPTANCE_LINES: list[tuple[int, bool, str]] = []


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def record():
    def _record(number: int, ok: bool, message: str) -> None:
        ACCEPTANCE_LINES.append((number, bool(ok), message))
        print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} - {message}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number, ok, message in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} - {message}")
