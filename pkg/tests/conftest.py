import numpy as np
import pytest


def rand_complex(rng, rows, cols=None):
    cols = rows if cols is None else cols
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def rand_hermitian(rng, n):
    G = rand_complex(rng, n)
    return (G + G.conj().T) / 2


def rand_unitary(rng, n):
    Q, _ = np.linalg.qr(rand_complex(rng, n))
    return Q


def rand_psd(rng, n, rank=None):
    G = rand_complex(rng, n, n if rank is None else rank)
    return G @ G.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20181)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for _, line in RESULTS.values():
            terminalreporter.write_line(line)
