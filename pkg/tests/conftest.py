import os
import sys

import pytest

# Deep expression nesting and high fuel budgets recurse well past the
# default limit; ~12k frames is still safe on the main thread's stack.
sys.setrecursionlimit(12_000)

PROGRAMS = os.path.join(os.path.dirname(__file__), os.pardir, "programs")


def program_path(name: str) -> str:
    return os.path.abspath(os.path.join(PROGRAMS, name))


@pytest.fixture(scope="session")
def simplifier_module():
    from rascal_light.parser import load_module

    return load_module(program_path("simplifier.rsl"))


@pytest.fixture(scope="session")
def knapsack_module():
    from rascal_light.parser import load_module

    return load_module(program_path("knapsack.rsl"))
