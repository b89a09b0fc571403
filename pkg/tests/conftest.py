import pytest

from sqrtsim.corpus import build_inc_machine, build_two_tape_example, generate_corpus


@pytest.fixture(scope="session")
def inc():
    return build_inc_machine()


@pytest.fixture(scope="session")
def demo():
    """Two-tape machine with the worked 7-step block structure."""
    return build_two_tape_example()


@pytest.fixture(scope="session")
def small_corpus():
    """Ten seeded (machine, input) pairs that stay live for 64 steps."""
    return generate_corpus(seed=11, count=10, min_live_steps=64)
