import pytest

from goodman_lab.flow_model import SuspensionFlow
from goodman_lab.scene import Scene

CAT = [[2, 1], [1, 1]]


@pytest.fixture(scope="session")
def cat():
    return SuspensionFlow.from_rows(CAT)


@pytest.fixture(scope="session")
def scene():
    cache = {}

    def load(name):
        if name not in cache:
            cache[name] = Scene.load(name)
        return cache[name]
    return load
