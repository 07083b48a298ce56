import numpy as np
import pytest

from zenometer import PAULI_X, PAULI_Y, PAULI_Z, BetaSchedule

# two-level spin: H = omega sigma_x with omega = 1, A = sigma_y, |1> the +1 eigenvector of H
SPIN_H = PAULI_X
SPIN_A = PAULI_Y
SPIN_I = np.array([1.0, 1.0]) / np.sqrt(2.0)
PLUS_Z = np.array([1.0, 0.0])
MINUS_Z = np.array([0.0, 1.0])


@pytest.fixture
def spin():
    return SPIN_H, SPIN_A, SPIN_I


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def spin_beta(T):
    return BetaSchedule.time_average(T)


def commuting_pair(rng, n):
    """H and A diagonal in a shared random unitary basis."""
    q, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
    e = rng.normal(size=n)
    a = rng.normal(size=n)
    return (q * e) @ q.conj().T, (q * a) @ q.conj().T, q, e, a


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def report(label, ok, detail):
        _ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
        assert ok, f"{label}: {detail}"

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
