import pytest

from ipdyn import dynamics


@pytest.fixture(scope="session")
def chacon():
    return dynamics.chacon()


@pytest.fixture(scope="session")
def fib():
    return dynamics.fibonacci()
