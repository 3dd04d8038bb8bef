import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_TITLES = {
    1: "geometry oracle suite",
    2: "sky normalization",
    3: "sky component vs Monte Carlo, quadrature convergence",
    4: "split-flux IRC worked example",
    5: "solar position vs NOAA oracle",
    6: "LGI qualitative findings",
    7: "sunspot geometry",
    8: "engine linearity and determinism",
    9: "validation loop closes",
}
_results: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record one acceptance criterion's outcome, print it, then assert it."""
    def record(number: int, ok: bool, detail: str = ""):
        _results[number] = (bool(ok), detail)
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {ACCEPTANCE_TITLES[number]} -- {detail}")
        assert ok, f"criterion {number} failed: {detail}"
    return record


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in ACCEPTANCE_TITLES.items():
        ok, detail = _results.get(n, (False, "not run"))
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n}. {title} -- {detail}")
