import pytest

from ternary_mass import lfunctions


@pytest.fixture(scope="session")
def newform_1m():
    """Shared million-coefficient series: one eta expansion per test run."""
    return lfunctions.newform20(1_000_000)


@pytest.fixture(scope="session")
def newform_small():
    return lfunctions.newform20(5_000)
