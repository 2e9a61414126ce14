from __future__ import annotations

import pytest

from cqltl.bundled import duplication_showcase, running_example, single_node_halt


@pytest.fixture(scope="session")
def running():
    return running_example()


@pytest.fixture(scope="session")
def sigma(running):
    return running.traces["sigma"]


@pytest.fixture(scope="session")
def halt():
    return single_node_halt()


@pytest.fixture(scope="session")
def duplication():
    return duplication_showcase()
