import pytest
from hypothesis import settings

from syndetic.config import RunConfig
from syndetic.groups import FreeGroup, IntegerGroup

settings.register_profile("default", derandomize=True, deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def config():
    return RunConfig()


@pytest.fixture
def z():
    return IntegerGroup()


@pytest.fixture
def f2():
    return FreeGroup(2)
