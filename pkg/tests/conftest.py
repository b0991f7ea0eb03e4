import numpy as np
import pytest

from tbsolve.games import kuhn
from tbsolve.treeplex import Treeplex, random_treeplex, simplex_treeplex


def fixed_shapes():
    """A handful of treeplexes of depth 1 to 4 used across the suite."""
    rng = np.random.default_rng(1234)
    shapes = {
        "simplex2": simplex_treeplex(2),
        "simplex3": simplex_treeplex(3),
        "two-level": Treeplex.from_parents([0, 1, 2], [2, 2, 2]),
        "kuhn": kuhn().treeplex_x,
        "kuhn-y": kuhn().treeplex_y,
    }
    for depth in (2, 3, 4):
        shapes[f"random-d{depth}"] = random_treeplex(rng, depth, max_sequences=60)
    return shapes


SHAPES = fixed_shapes()


@pytest.fixture(scope="session")
def shapes():
    return SHAPES


@pytest.fixture(scope="session")
def kuhn_game():
    return kuhn()


@pytest.fixture
def rng():
    return np.random.default_rng(0)
