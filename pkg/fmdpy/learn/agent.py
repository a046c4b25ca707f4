"""
the optimistic-initial-model learner.

    start from a model in which every transition leads to the garden of Eden,
    plan with FVI on the empirical model, act greedily, count, repeat.

there is no explicit exploration: optimism of the fake experience drives it.
"""
import logging
import typing as t
from typing import NamedTuple, Tuple

import numpy as np

from fmdpy.approx.basis import BasisSet
from fmdpy.approx.fvi import PlannerConfig, PlannerResult, q_value, solve
from fmdpy.core.model import FmdpSpec, factored_size
from fmdpy.core.space import StateAssignment, local_index
from fmdpy.env.sim import Environment
from fmdpy.errors import ConfigError, FormulaDomainError, NonConvergenceError
from fmdpy.learn import theory
from fmdpy.learn.counts import CountsModel, current_model, init_counts, known_components, known_fraction, observe
from fmdpy.learn.goe import GoeSpec, goe_augment

logger = logging.getLogger(__name__)


class FoimConfig(NamedTuple):
    epsilon: float = 0.1
    delta: float = 0.1
    # multiplier of the R_E formula
    c: float = 1.0
    # explicit R_E, overrides the formula
    r_e: t.Optional[float] = None
    replan_every: int = 1
    warm_start: bool = True
    planner: PlannerConfig = PlannerConfig()
    c_kb: float = 1.0
    seed: int = 0

    def validate(self) -> 'FoimConfig':
        if not 0 < self.epsilon:
            raise ConfigError(f'epsilon must be > 0, got {self.epsilon}')
        if not 0 < self.delta < 1:
            raise ConfigError(f'delta must be in (0, 1), got {self.delta}')
        if self.replan_every < 1:
            raise ConfigError(f'replan_every must be >= 1, got {self.replan_every}')
        if self.r_e is not None and not self.r_e > 0:
            raise ConfigError(f'R_E must be > 0, got {self.r_e}')
        if not self.c > 0 or not self.c_kb > 0:
            raise ConfigError('formula constants must be > 0')
        self.planner.validate()
        return self


class StepRecord(NamedTuple):
    t: int
    state: StateAssignment
    action: int
    next_state: StateAssignment
    # Q of the taken action under the model the agent acted on
    q: float
    # per factor, whether (x[Gamma_i], a) is known after this step
    known: Tuple[bool, ...]
    known_fraction: float
    # number of the plan the action was chosen with
    plan: int
    planner_iterations: int


class Constants(NamedTuple):
    r_e: float
    known_threshold: int
    v0: float
    horizon: float
    mistake_bound: float
    n_f: int


def derive_constants(base: FmdpSpec, config: FoimConfig) -> Constants:
    """
    title: derived constants
    prepare:
    >>> from fmdpy.env.generators import make_chain
    >>> from fmdpy.learn.agent import FoimConfig, derive_constants
    test:
    >>> constants = derive_constants(make_chain(2, 2, 0.1), FoimConfig(epsilon=0.5, delta=0.1, r_e=7.0))
    >>> assert constants.r_e == 7.0 and constants.known_threshold == 104 and constants.n_f == 4
    """
    m, a, n_f = base.m, base.num_actions, factored_size(base)
    if config.r_e is None:
        if not base.r_max > 0:
            raise FormulaDomainError('R_E: rmax is 0, so the garden-of-Eden reward vanishes; '
                                     'declare rmax in the document or give R_E explicitly')
        r_e = theory.r_e(config.epsilon, config.delta, m, n_f, a, base.r_max, base.gamma, config.c)
    else:
        r_e = float(config.r_e)
    # the last two are diagnostics; outside their formula domain they are reported as nan
    try:
        horizon = theory.epsilon_horizon(config.epsilon, base.gamma, r_e)
    except FormulaDomainError:
        horizon = float('nan')
    try:
        bound = theory.mistake_bound(config.epsilon, config.delta, m, n_f, a, base.r_max, base.gamma)
    except FormulaDomainError:
        bound = float('nan')
    return Constants(
        r_e=r_e,
        known_threshold=theory.known_threshold(config.epsilon, config.delta, m, n_f, a, config.c_kb),
        v0=theory.v0_bound(max(base.r_max, r_e), base.gamma),
        horizon=horizon,
        mistake_bound=bound,
        n_f=n_f,
    )


def q_values(model: FmdpSpec, basis: BasisSet, w: np.ndarray, x: StateAssignment) -> np.ndarray:
    return np.array([q_value(model, basis, w, x, a) for a in range(model.num_actions)])


def select_action(model: FmdpSpec, basis: BasisSet, w: np.ndarray, x: StateAssignment) -> int:
    """greedy in the model; ties go to the lowest action index."""
    return int(np.argmax(q_values(model, basis, w, x)))


class FoimAgent:
    """
    owns the counts and the latest weights. the structure and the reward
    factors of `base` are given; its transition tables are never read here.
    """

    def __init__(self, base: FmdpSpec, basis: BasisSet, config: FoimConfig = FoimConfig(),
                 rng: t.Optional[np.random.Generator] = None):
        self.config = config.validate()
        self.constants = derive_constants(base, config)
        self.goe: GoeSpec = goe_augment(base, basis, self.constants.r_e)
        self.counts: CountsModel = init_counts(self.goe)
        self.rng = np.random.default_rng(config.seed) if rng is None else rng
        self.weights: t.Optional[np.ndarray] = None
        self.t = 0
        self.plans = 0
        self.last_plan: t.Optional[PlannerResult] = None
        self._model: t.Optional[FmdpSpec] = None
        logger.info('FOIM agent: R_E = %.6g, KB = %d, N_f = %d', self.constants.r_e, self.constants.known_threshold,
                    self.constants.n_f)

    @property
    def basis(self) -> BasisSet:
        return self.goe.basis

    @property
    def model(self) -> FmdpSpec:
        if self._model is None:
            self._model = current_model(self.counts, self.goe)
        return self._model

    def restore(self, counts: CountsModel, weights: t.Optional[np.ndarray], t_: int, plans: int):
        self.counts = counts
        self.weights = weights
        self.t = t_
        self.plans = plans
        self._model = None

    def plan(self) -> PlannerResult:
        w0 = self.weights if self.config.warm_start else None
        result = solve(self.model, self.basis, self.config.planner, w0=w0, rng=self.rng)
        if not result.converged:
            raise NonConvergenceError(
                f'planner did not converge at step {self.t}: residual {result.residual:.6g} after '
                f'{result.iterations} sweeps', result)
        self.weights = result.weights
        self.last_plan = result
        self.plans += 1
        logger.debug('step %d: plan %d in %d sweeps', self.t, self.plans, result.iterations)
        return result

    def known_fraction(self) -> float:
        return known_fraction(self.counts, self.constants.known_threshold)

    def step(self, env: Environment) -> StepRecord:
        iterations = 0
        if self.weights is None or self.t % self.config.replan_every == 0:
            iterations = self.plan().iterations
        x = env.state
        a = select_action(self.model, self.basis, self.weights, x)
        q = q_value(self.model, self.basis, self.weights, x, a)
        y = env.step(a)
        self.counts = observe(self.counts, x, a, y)
        self._model = None

        threshold = self.constants.known_threshold
        known = tuple(
            bool(mask[a, local_index(x, scope, shape)])
            for mask, scope, shape in zip(known_components(self.counts, threshold), self.counts.scopes,
                                          self.counts.shapes))
        record = StepRecord(self.t, x, a, y, q, known, self.known_fraction(), self.plans, iterations)
        self.t += 1
        return record


def foim_step(agent: FoimAgent, env: Environment) -> StepRecord:
    """
    title: counts grow by one per factor
    prepare:
    >>> import numpy as np
    >>> from fmdpy.env.generators import make_chain
    >>> from fmdpy.env.sim import Environment
    >>> from fmdpy.approx.basis import indicator_basis
    >>> from fmdpy.approx.fvi import PlannerConfig
    >>> from fmdpy.learn.agent import FoimAgent, FoimConfig, foim_step
    test:
    >>> chain = make_chain(2, 2, 0.0)
    >>> config = FoimConfig(r_e=5.0, planner=PlannerConfig(exhaustive=True))
    >>> agent = FoimAgent(chain, indicator_basis(chain.space), config)
    >>> env = Environment(chain, np.random.default_rng(0))
    >>> before = agent.counts.total_visits
    >>> record = foim_step(agent, env)
    >>> assert agent.counts.total_visits == before + 2
    >>> assert record.action == 0 and record.t == 0
    """
    return agent.step(env)
