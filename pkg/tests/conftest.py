import pytest

from flexpoly.assembly import construct
from flexpoly.config import RunConfig
from flexpoly.verify import Context


@pytest.fixture(scope="session")
def con():
    return construct()


@pytest.fixture(scope="session")
def ctx():
    return Context(RunConfig())
