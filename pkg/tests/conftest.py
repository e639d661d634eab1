import pytest

from hoairy.weights import make_fermi


@pytest.fixture(scope="session")
def fermi1():
    return make_fermi(1.0)
