import json
from pathlib import Path

import numpy as np
import pytest

from qwspdc.core import WalkAngles, dispersion

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def pilot():
    return json.loads((FIXTURES / "pilot.json").read_text())


@pytest.fixture
def rng():
    return np.random.default_rng(20261014)


def random_gapped_angles(rng, count, margin=1e-3, num_k=256):
    """Angle pairs whose gap stays open by ``margin`` in |sin E| on a num_k grid."""
    out = []
    k = -np.pi + 2 * np.pi * np.arange(num_k) / num_k
    while len(out) < count:
        t1, t2 = rng.uniform(-np.pi, np.pi, 2)
        angles = WalkAngles(t1, t2)
        if np.min(np.abs(np.sin(dispersion(angles, k)))) > margin:
            out.append(angles)
    return out


def pauli_hamiltonian(n):
    nx, ny, nz = n
    return np.array([[nz, nx - 1j * ny], [nx + 1j * ny, -nz]])


ACCEPTANCE_LINES = {}


def record_criterion(number, title, ok, detail):
    """Store one pass/fail line; printed in the terminal summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
