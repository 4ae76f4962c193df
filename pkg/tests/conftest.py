import random

import pytest

from atrahasis.fields import binary_field, prime_field
from atrahasis.fixtures import atrahasis_956


@pytest.fixture(scope="session")
def gf16():
    return binary_field(4)


@pytest.fixture(scope="session")
def gf127():
    return prime_field(127)


@pytest.fixture(scope="session")
def fixture_family():
    return atrahasis_956()


@pytest.fixture()
def rng():
    return random.Random(0xA7A)


def random_values(rng, spec, count):
    return [rng.randrange(spec.order) for _ in range(count)]
