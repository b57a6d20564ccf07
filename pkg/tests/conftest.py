import pytest

from knowhow.fixtures import load_fixture


@pytest.fixture(scope="session")
def t1():
    return load_fixture("t1")


@pytest.fixture(scope="session")
def t2():
    return load_fixture("t2")
