import numpy as np
import pytest

from fmdpy.approx.basis import BasisFunction, BasisSet
from fmdpy.core.space import VariableSpace
from fmdpy.core.tables import LocalTable
from fmdpy.env.generators import make_chain, make_random_fmdp

SINGLE_STATE = """
# one state, one action, reward 1 forever
fmdp single {
    gamma = 0.5;
    variables { x: 1; }
    actions { stay; }
    transition x given (x) { stay (0): [1.0]; }
    reward r given () { stay (): 1.0; }
}
"""

SWAP = """
fmdp swap {
    gamma = 0.9;
    variables { a: 2; b: 2; }
    actions { go; }
    transition a given (b) { go (0): [1, 0]; go (1): [0, 1]; }
    transition b given (a) { go (0): [1, 0]; go (1): [0, 1]; }
    reward r given (a) { go (1): 1; }
}
"""


def random_model(seed: int, gamma: float = 0.9):
    """a seeded FMDP with m <= 4, n <= 3 and scopes of at most two variables."""
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, 5))
    sizes = tuple(int(n) for n in rng.integers(1, 4, size=m))
    return make_random_fmdp(m, sizes, min(2, m), int(rng.integers(1, 4)), seed=seed, gamma=gamma)


def random_basis(space: VariableSpace, rng: np.random.Generator, count: int = 4) -> BasisSet:
    """nonnegative functions over random scopes of at most two variables."""
    functions = []
    for k in range(count):
        size = int(rng.integers(1, min(2, space.m) + 1))
        scope = tuple(sorted(rng.choice(space.m, size=size, replace=False).tolist()))
        values = rng.uniform(0.05, 1.0, size=space.scope_size(scope))
        functions.append(BasisFunction(f'h{k}', LocalTable.over(scope, space, values)))
    return BasisSet.of(functions)


@pytest.fixture
def chain():
    return make_chain(3, 2, 0.1)


@pytest.fixture
def single_state_document(tmp_path):
    path = tmp_path / 'single.fmdp'
    path.write_text(SINGLE_STATE)
    return str(path)


@pytest.fixture
def swap_document(tmp_path):
    path = tmp_path / 'swap.fmdp'
    path.write_text(SWAP)
    return str(path)
