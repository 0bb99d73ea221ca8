from pathlib import Path

import numpy as np
import pytest

from tandemq import QueueParams

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures" / "reference"

STAGE1 = QueueParams(1.117, 0.409, 5)
STAGE2 = QueueParams(0.409, 0.244, 4)


@pytest.fixture
def fixture_dir() -> Path:
    return FIXTURES


def random_stable_stations(count: int, seed: int, max_servers: int = 12) -> list[QueueParams]:
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        c = int(rng.integers(1, max_servers + 1))
        mu = float(rng.uniform(0.05, 3.0))
        phi = float(rng.uniform(0.02, 0.95))
        out.append(QueueParams(phi * c * mu, mu, c))
    return out


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, failures: list[str]) -> str:
    status = "PASS" if not failures else "FAIL"
    line = f"[{status}] criterion {number}: {title}"
    if failures:
        line += f" ({len(failures)} mismatch{'es' if len(failures) > 1 else ''}; first: {failures[0]})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
