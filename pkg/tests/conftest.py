import numpy as np
import pytest


def pytest_addoption(parser):
    parser.addoption(
        "--household",
        default=None,
        help="path to the exported household expenditure CSV (housing,food,goods,service,gender)",
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_cloud(rng, n, d):
    x = rng.standard_normal((n, d))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def random_antisymmetric(rng, d, scale=1.0):
    a = rng.standard_normal((d, d)) * scale
    return a - a.T


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
