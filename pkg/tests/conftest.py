import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from provqbe import datasets  # noqa: E402


@pytest.fixture(scope="session")
def schema():
    return datasets.running_schema()


@pytest.fixture(scope="session")
def db():
    return datasets.running_instance()


@pytest.fixture(scope="session")
def full_ex():
    return datasets.running_example("full")


@pytest.fixture(scope="session")
def partial_ex():
    return datasets.running_example("partial")


@pytest.fixture(scope="session")
def mas():
    return datasets.mas_schema(), datasets.mas_instance()
