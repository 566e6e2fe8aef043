import random

import pytest
from hypothesis import settings

from aibe import MockGroup, context_new

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

P_SMALL = 101
P_BIG = 2 ** 61 - 1


@pytest.fixture
def g101():
    return MockGroup(P_SMALL)


@pytest.fixture
def gbig():
    return MockGroup(P_BIG)


@pytest.fixture(scope="session")
def curve():
    return context_new("curve")


@pytest.fixture
def rng():
    return random.Random(0xA1BE)
