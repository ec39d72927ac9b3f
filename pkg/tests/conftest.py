import numpy as np
import pytest

_acceptance_results = {}


def random_hermitian(rng, n, scale=1.0):
    A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (A + A.conj().T) / 2


def random_density(rng, n, rank=None):
    rank = rank or n
    A = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = A @ A.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, n):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def blockwise_oracle(func, rho, dA, dB):
    """(id x func)(rho) by explicit summation over |i><j| (x) func(block_ij)."""
    out = None
    for i in range(dA):
        for j in range(dA):
            block = np.array([[rho[i * dB + a, j * dB + b] for b in range(dB)] for a in range(dB)])
            E = np.zeros((dA, dA))
            E[i, j] = 1
            term = np.kron(E, func(block))
            out = term if out is None else out + term
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _acceptance_results[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in sorted(_acceptance_results.items()):
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
