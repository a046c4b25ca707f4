"""
factored value iteration on a uniform state sample.

    w_{t+1} = G max_a (r^a + gamma P^a H w_t)

`backup_state` and `q_value` are the per-state definitions; `compile_backups`
precomputes, per action, the sampled rewards and the expectations of every
basis function so that one sweep is a pair of matrix products.
"""
import logging
import math
import typing as t
from typing import NamedTuple, Tuple

import numpy as np

from fmdpy.approx.basis import BasisSet, NormalizationScheme, ProjectionOnSample, build_projection, project
from fmdpy.core.model import FmdpSpec, expected_local_value, reward
from fmdpy.core.space import StateAssignment, VariableSpace, all_states, local_indices
from fmdpy.errors import ConfigError, ContractError, NonConvergenceError

logger = logging.getLogger(__name__)

DIVERGENCE_FACTOR = 1e6


class PlannerConfig(NamedTuple):
    epsilon: float = 0.1
    delta: float = 0.1
    # explicit sample size, overrides the formula
    n1: t.Optional[int] = None
    # sample every joint state exactly once
    exhaustive: bool = False
    max_iters: int = 10000
    sample_constant: float = 1.0
    seed: t.Optional[int] = None
    scheme: NormalizationScheme = NormalizationScheme.GLOBAL

    def validate(self) -> 'PlannerConfig':
        if not self.epsilon > 0:
            raise ConfigError(f'epsilon must be > 0, got {self.epsilon}')
        if not 0 < self.delta < 1:
            raise ConfigError(f'delta must be in (0, 1), got {self.delta}')
        if self.max_iters < 1:
            raise ConfigError(f'max_iters must be >= 1, got {self.max_iters}')
        if self.n1 is not None and self.n1 < 1:
            raise ConfigError(f'sample size must be >= 1, got {self.n1}')
        if not self.sample_constant > 0:
            raise ConfigError(f'sample constant must be > 0, got {self.sample_constant}')
        return self


class PlannerResult(NamedTuple):
    weights: np.ndarray
    iterations: int
    residual: float
    converged: bool
    states: Tuple[StateAssignment, ...]
    residuals: Tuple[float, ...]
    projection: ProjectionOnSample


class CompiledBackups(NamedTuple):
    gamma: float
    # (A, N1)
    rewards: np.ndarray
    # (A, N1, K): E[h_k(y[C_k]) | x, a] for every sampled x
    expectations: np.ndarray

    def q_values(self, w: np.ndarray) -> np.ndarray:
        return self.rewards + self.gamma * (self.expectations @ w)

    def backups(self, w: np.ndarray) -> np.ndarray:
        return self.q_values(w).max(axis=0)


def sample_size(space: VariableSpace, config: PlannerConfig) -> int:
    """
    title: sample size
    prepare:
    >>> from fmdpy.core.space import VariableSpace
    >>> from fmdpy.approx.fvi import PlannerConfig, sample_size
    test:
    >>> space = VariableSpace.of((2, 2, 2, 2))
    >>> assert sample_size(space, PlannerConfig(epsilon=0.5, delta=0.1)) == 16
    >>> big = VariableSpace.of((10, ) * 4)
    >>> assert sample_size(big, PlannerConfig(epsilon=0.5, delta=0.1)) == 237
    >>> assert sample_size(big, PlannerConfig(exhaustive=True)) == 10000
    """
    config.validate()
    if config.exhaustive:
        return space.joint_size
    if config.n1 is not None:
        return config.n1
    m = space.m
    wanted = math.ceil(config.sample_constant * m * m / config.epsilon**2 * math.log(m / config.delta))
    size = min(space.joint_size, wanted)
    if size < 1:
        raise ConfigError(f'sample size formula gave {size}')
    return size


def sample_states(space: VariableSpace, config: PlannerConfig,
                  rng: np.random.Generator) -> t.List[StateAssignment]:
    """i.i.d. uniform joint states, with replacement; every state once in exhaustive mode."""
    size = sample_size(space, config)
    if config.exhaustive:
        return list(all_states(space))
    draws = rng.integers(0, np.array(space.sizes), size=(size, space.m))
    return [tuple(int(v) for v in row) for row in draws]


def q_value(model: FmdpSpec, basis: BasisSet, w: np.ndarray, x: StateAssignment, a: int) -> float:
    """
    title: one-step lookahead
    prepare:
    >>> import numpy as np
    >>> from fmdpy.env.generators import make_chain
    >>> from fmdpy.approx.basis import indicator_basis
    >>> from fmdpy.approx.fvi import q_value
    test:
    >>> chain = make_chain(2, 2, 0.0, gamma=0.0)
    >>> basis = indicator_basis(chain.space)
    >>> assert q_value(chain, basis, np.ones(basis.size), (1, 1), 0) == 1.0
    >>> assert q_value(chain, basis, np.ones(basis.size), (0, 0), 1) == 0.0
    """
    future = sum(w_k * expected_local_value(model, x, a, h.table) for w_k, h in zip(w, basis.functions))
    return reward(model, x, a) + model.gamma * float(future)


def backup_state(model: FmdpSpec, basis: BasisSet, w: np.ndarray, x: StateAssignment) -> float:
    return max(q_value(model, basis, w, x, a) for a in range(model.num_actions))


def _scope_expectation(model: FmdpSpec, states: np.ndarray, a: int, h) -> np.ndarray:
    # joint distribution over X[C] per state, the scope's first variable fastest
    joint = np.ones((len(states), 1))
    for i in h.scope:
        f = model.transitions[i]
        rows = f.rows[a, local_indices(states, f.scope, f.shape)]
        joint = (rows[:, :, None] * joint[:, None, :]).reshape(len(states), -1)
    return joint @ h.table.values


def compile_backups(model: FmdpSpec, basis: BasisSet, states: t.Sequence[StateAssignment]) -> CompiledBackups:
    array = np.asarray(states, dtype=np.int64).reshape(len(states), model.m)
    rewards = np.zeros((model.num_actions, len(states)))
    expectations = np.empty((model.num_actions, len(states), basis.size))
    for a in range(model.num_actions):
        for r in model.rewards:
            rewards[a] += r.table[a, local_indices(array, r.scope, r.shape)]
        for k, h in enumerate(basis.functions):
            expectations[a, :, k] = _scope_expectation(model, array, a, h)
    return CompiledBackups(model.gamma, rewards, expectations)


def avi_iterate(model: FmdpSpec,
                basis: BasisSet,
                proj: ProjectionOnSample,
                w: np.ndarray,
                compiled: t.Optional[CompiledBackups] = None) -> np.ndarray:
    """
    title: myopic sweep averages the best reward
    prepare:
    >>> import numpy as np
    >>> from fmdpy.env.generators import make_random_fmdp
    >>> from fmdpy.core.model import reward
    >>> from fmdpy.core.space import all_states
    >>> from fmdpy.approx.basis import constant_basis, full_projection
    >>> from fmdpy.approx.fvi import avi_iterate
    test:
    >>> model = make_random_fmdp(2, 2, 2, 2, seed=1, gamma=0.0)
    >>> basis = constant_basis()
    >>> proj = full_projection(basis, model.space)
    >>> best = [max(reward(model, x, a) for a in range(2)) for x in all_states(model.space)]
    >>> assert abs(avi_iterate(model, basis, proj, np.zeros(1))[0] - np.mean(best)) < 1e-12
    """
    if compiled is None:
        compiled = compile_backups(model, basis, proj.states)
    if compiled.rewards.shape[1] != proj.num_states:
        raise ContractError('compiled backups do not match the projection sample')
    return project(proj, compiled.backups(np.asarray(w, dtype=float)))


def divergence_limit(model: FmdpSpec) -> float:
    """10^6 V0, V0 taken over the summed reward bound J R_max."""
    r = max(len(model.rewards) * model.r_max, 1.0)
    gamma = model.gamma
    return DIVERGENCE_FACTOR * (3 - gamma) / (1 - gamma) * r / (1 - gamma)


def solve(model: FmdpSpec,
          basis: BasisSet,
          config: PlannerConfig = PlannerConfig(),
          w0: t.Optional[np.ndarray] = None,
          rng: t.Optional[np.random.Generator] = None,
          states: t.Optional[t.Sequence[StateAssignment]] = None) -> PlannerResult:
    """
    iterate from w0 (zero by default) until the sup-norm change of the
    weights drops to epsilon (1 - gamma), or max_iters sweeps.

    title: geometric series
    prepare:
    >>> import numpy as np
    >>> from fmdpy.core.model import FmdpSpec
    >>> from fmdpy.core.space import VariableSpace
    >>> from fmdpy.core.tables import TransitionFactor, RewardFactor
    >>> from fmdpy.approx.basis import constant_basis
    >>> from fmdpy.approx.fvi import PlannerConfig, solve
    test:
    >>> one = FmdpSpec(VariableSpace.of((1, )), 1, (TransitionFactor(0, (0, ), (1, ), np.ones((1, 1, 1))), ),
    >>>                (RewardFactor((), (), np.ones((1, 1))), ), 0.5, (0, ), 1, 1.0)
    >>> result = solve(one, constant_basis(), PlannerConfig(epsilon=1e-9, exhaustive=True))
    >>> assert result.converged and abs(result.weights[0] - 2.0) < 1e-6
    """
    config.validate()
    if states is None:
        rng = np.random.default_rng(config.seed) if rng is None else rng
        states = sample_states(model.space, config, rng)
    proj = build_projection(basis, states, config.scheme)
    compiled = compile_backups(model, basis, proj.states)

    stop = config.epsilon * (1 - model.gamma)
    limit = divergence_limit(model)
    w = np.zeros(basis.size) if w0 is None else np.array(w0, dtype=float)
    if w.shape != (basis.size, ):
        raise ContractError(f'warm start has shape {w.shape}, basis has {basis.size} functions')

    residuals = []
    converged = False
    for _ in range(config.max_iters):
        w_next = project(proj, compiled.backups(w))
        residual = float(np.max(np.abs(w_next - w)))
        residuals.append(residual)
        w = w_next
        logger.debug('sweep %d residual %.6g', len(residuals), residual)
        if residual <= stop:
            converged = True
            break
        if not np.isfinite(residual) or residual > limit:
            partial = PlannerResult(w, len(residuals), residual, False, proj.states, tuple(residuals), proj)
            raise NonConvergenceError(f'residual {residual:.6g} exceeds {limit:.6g} after {len(residuals)} sweeps',
                                      partial)

    if not converged:
        logger.warning('planner stopped after %d sweeps, residual %.6g > %.6g', len(residuals), residuals[-1], stop)
    return PlannerResult(w, len(residuals), residuals[-1], converged, proj.states, tuple(residuals), proj)
