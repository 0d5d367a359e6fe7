import json

import numpy as np
import pytest
from hypothesis import settings

from bandcone.cli import fixture_path, parse_dataset
from bandcone.glm import fit_logistic

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture(scope="session")
def aa9_data():
    return parse_dataset(fixture_path("lavelle_9aa.csv"))[0]


@pytest.fixture(scope="session")
def aa9_fit(aa9_data):
    return fit_logistic(aa9_data)


@pytest.fixture(scope="session")
def icu():
    doc = json.loads(fixture_path("icu_fisher_inv.json").read_text())
    return {k: np.array(v) if k in ("fisher_inv", "beta_hat") else v for k, v in doc.items()}


def random_spd(rng, dim, spread=3.0):
    q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    vals = np.exp(rng.uniform(-spread, spread, dim))
    m = (q * vals) @ q.T
    return 0.5 * (m + m.T)


ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, ok: bool, summary: str, seconds: float) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {summary} ({seconds:.2f} s)"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
