import logging
import typing as t

import numpy as np

from fmdpy.core.model import FmdpSpec
from fmdpy.core.space import StateAssignment, check_state
from fmdpy.errors import ContractError

logger = logging.getLogger(__name__)


class Environment:
    """
    the true FMDP an agent interacts with. agents may read the structure
    (scopes) and the reward factors of `model`; the transition tables are
    only used here, to sample successors.
    """

    def __init__(self, model: FmdpSpec, rng: np.random.Generator, state: t.Optional[StateAssignment] = None):
        self.model = model
        self.rng = rng
        self.state = check_state(model.start if state is None else state, model.space)

    def step(self, a: int) -> StateAssignment:
        self.state = sample_next(self, a)
        return self.state


def sample_next(env: Environment, a: int, rng: t.Optional[np.random.Generator] = None) -> StateAssignment:
    """
    draws y[i] ~ P_i(. | x[Gamma_i], a) independently for every variable.

    title: deterministic successor
    prepare:
    >>> import numpy as np
    >>> from fmdpy.env.generators import make_chain
    >>> from fmdpy.env.sim import Environment, sample_next
    test:
    >>> env = Environment(make_chain(3, 2, 0.0), np.random.default_rng(0))
    >>> assert all(sample_next(env, 1) == (1, 0, 0) for _ in range(20))
    """
    model = env.model
    if not 0 <= a < model.num_actions:
        raise ContractError(f'action {a} not in [0, {model.num_actions})')
    rng = env.rng if rng is None else rng
    draws = rng.random(model.m)
    y = [0] * model.m
    for f, u in zip(model.transitions, draws):
        cdf = np.cumsum(f.row(env.state, a))
        y[f.target] = min(int(np.searchsorted(cdf, u, side='right')), len(cdf) - 1)
    return tuple(y)
