"""
factored MDP model and the factored-structure math on it.

    P(y | x, a) = prod_i P_i(y[i] | x[Gamma_i], a)
    R(x, a)     = sum_j R_j(x[Z_j], a)

a model is immutable after construction; every function here is a pure read.
"""
import functools
import math
import typing as t
from enum import Enum, auto as _auto
from typing import NamedTuple, Tuple

import numpy as np

from fmdpy.core.space import StateAssignment, VariableSpace, check_state
from fmdpy.core.tables import LocalTable, RewardFactor, TransitionFactor

ROW_SUM_TOLERANCE = 1e-12


class FmdpSpec(NamedTuple):
    space: VariableSpace
    num_actions: int
    transitions: Tuple[TransitionFactor, ...]
    rewards: Tuple[RewardFactor, ...]
    gamma: float
    start: StateAssignment
    scope_bound: int
    r_max: float
    variable_names: Tuple[str, ...] = ()
    action_names: Tuple[str, ...] = ()
    reward_names: Tuple[str, ...] = ()

    @property
    def m(self) -> int:
        return self.space.m

    def names(self) -> 'FmdpSpec':
        """the same model with generated names filled in where missing."""
        return self._replace(
            variable_names=self.variable_names or tuple(f'x{i}' for i in range(self.m)),
            action_names=self.action_names or tuple(f'a{i}' for i in range(self.num_actions)),
            reward_names=self.reward_names or tuple(f'r{j}' for j in range(len(self.rewards))),
        )


class ViolationKind(Enum):
    FACTOR_COUNT = _auto()
    TABLE_SHAPE = _auto()
    ROW_SUM = _auto()
    NEGATIVE_PROBABILITY = _auto()
    SCOPE_BOUND = _auto()
    SCOPE_ORDER = _auto()
    REWARD_RANGE = _auto()
    GAMMA_RANGE = _auto()
    START_STATE = _auto()


class Violation(NamedTuple):
    kind: ViolationKind
    where: str
    message: str
    value: float = float('nan')


def factored_size(model: FmdpSpec) -> int:
    """N_f, the largest number of rows of any transition factor."""
    return max(model.space.scope_size(f.scope) for f in model.transitions)


def factor_distributions(model: FmdpSpec, x: StateAssignment, a: int,
                         targets: t.Iterable[int]) -> t.List[np.ndarray]:
    return [model.transitions[i].row(x, a) for i in targets]


def kron_all(distributions: t.Sequence[np.ndarray]) -> np.ndarray:
    """
    Kronecker product laid out so that the first distribution varies fastest,
    matching the flat-index convention.
    """
    if not distributions:
        return np.ones(1)
    return functools.reduce(np.kron, reversed(distributions))


def transition_prob(model: FmdpSpec, x: StateAssignment, a: int, y: StateAssignment) -> float:
    """
    title: transition probability
    prepare:
    >>> from fmdpy.env.generators import make_chain
    >>> from fmdpy.core.model import transition_prob
    test:
    >>> chain = make_chain(2, 2, 0.0)
    >>> assert transition_prob(chain, (0, 0), 1, (1, 0)) == 1.0
    >>> assert transition_prob(chain, (0, 0), 1, (1, 1)) == 0.0
    """
    check_state(x, model.space)
    check_state(y, model.space)
    return math.prod(float(f.row(x, a)[y[f.target]]) for f in model.transitions)


def successor_distribution(model: FmdpSpec, x: StateAssignment, a: int) -> np.ndarray:
    """the joint distribution P(. | x, a) over flat indices."""
    return kron_all(factor_distributions(model, x, a, range(model.m)))


def expected_local_value(model: FmdpSpec, x: StateAssignment, a: int, h: LocalTable) -> float:
    """
    E[h(y[C]) | x, a] over the successor y, using only the factors in C.

    title: expected local value
    prepare:
    >>> import numpy as np
    >>> from fmdpy.core.tables import LocalTable
    >>> from fmdpy.core.model import expected_local_value
    >>> from fmdpy.env.generators import make_random_fmdp
    test:
    >>> model = make_random_fmdp(3, 2, 2, 2, seed=3)
    >>> one = LocalTable.over((), model.space, [1.0])
    >>> assert abs(expected_local_value(model, (0, 1, 0), 1, one) - 1.0) < 1e-12
    >>> ind = LocalTable.over((2, ), model.space, [0.0, 1.0])
    >>> p = model.transitions[2].row((0, 1, 0), 1)[1]
    >>> assert abs(expected_local_value(model, (0, 1, 0), 1, ind) - p) < 1e-15
    """
    weights = kron_all(factor_distributions(model, x, a, h.scope))
    return float(weights @ h.values)


def reward(model: FmdpSpec, x: StateAssignment, a: int) -> float:
    return float(sum(r.at(x, a) for r in model.rewards))


def validate_model(model: FmdpSpec, tol: float = ROW_SUM_TOLERANCE) -> t.List[Violation]:
    """
    every structural invariant of the model, as records; empty means valid.

    title: validate model
    prepare:
    >>> from fmdpy.env.generators import make_random_fmdp
    >>> from fmdpy.core.model import validate_model, ViolationKind
    test:
    >>> model = make_random_fmdp(3, 2, 2, 2, seed=11)
    >>> assert validate_model(model) == []
    >>> model.transitions[0].rows[1, 0] *= 2
    >>> found = validate_model(model)
    >>> assert [v.kind for v in found] == [ViolationKind.ROW_SUM]
    >>> assert abs(found[0].value - 2.0) < 1e-9
    """
    found = []
    space = model.space

    if not 0.0 <= model.gamma < 1.0:
        found.append(Violation(ViolationKind.GAMMA_RANGE, 'gamma', f'gamma = {model.gamma} not in [0, 1)',
                               model.gamma))

    if len(model.start) != space.m or any(not 0 <= v < n for v, n in zip(model.start, space.sizes)):
        found.append(Violation(ViolationKind.START_STATE, 'start', f'start {model.start} invalid'))

    # factor i drives variable i
    targets = [f.target for f in model.transitions]
    if targets != list(range(space.m)):
        found.append(
            Violation(ViolationKind.FACTOR_COUNT, 'transitions',
                      f'expected factor i to target variable i for i in 0..{space.m - 1}, got targets {targets}'))

    def check_scope(where, scope):
        if any(b <= a for a, b in zip(scope, scope[1:])) or any(not 0 <= i < space.m for i in scope):
            found.append(Violation(ViolationKind.SCOPE_ORDER, where, f'scope {scope} malformed'))
            return False
        if len(scope) > model.scope_bound:
            found.append(
                Violation(ViolationKind.SCOPE_BOUND, where,
                          f'scope bound exceeded: |{scope}| > {model.scope_bound}', len(scope)))
        return True

    for f in model.transitions:
        where = f'transition {f.target}'
        if not 0 <= f.target < space.m:
            continue
        if not check_scope(where, f.scope):
            continue
        expected = (model.num_actions, space.scope_size(f.scope), space.sizes[f.target])
        if f.rows.shape != expected:
            found.append(Violation(ViolationKind.TABLE_SHAPE, where, f'table shape {f.rows.shape} != {expected}'))
            continue
        if (f.rows < 0).any():
            found.append(Violation(ViolationKind.NEGATIVE_PROBABILITY, where, 'negative probability'))
        sums = f.rows.sum(axis=2)
        for a, row in zip(*np.nonzero(np.abs(sums - 1.0) > tol)):
            total = float(sums[a, row])
            found.append(
                Violation(ViolationKind.ROW_SUM, f'{where} action {a} row {row}', f'row sum = {total}', total))

    for j, r in enumerate(model.rewards):
        where = f'reward {j}'
        if not check_scope(where, r.scope):
            continue
        expected = (model.num_actions, space.scope_size(r.scope))
        if r.table.shape != expected:
            found.append(Violation(ViolationKind.TABLE_SHAPE, where, f'table shape {r.table.shape} != {expected}'))
            continue
        if r.table.size and (r.table.min() < 0 or r.table.max() > model.r_max):
            found.append(
                Violation(ViolationKind.REWARD_RANGE, where, f'rewards outside [0, {model.r_max}]',
                          float(r.table.max())))
    return found


def specs_equal(a: FmdpSpec, b: FmdpSpec) -> bool:
    """structural equality; tables compare exactly."""
    if (a.space, a.num_actions, a.gamma, tuple(a.start), a.scope_bound, a.r_max) != \
            (b.space, b.num_actions, b.gamma, tuple(b.start), b.scope_bound, b.r_max):
        return False
    if len(a.transitions) != len(b.transitions) or len(a.rewards) != len(b.rewards):
        return False
    for f, g in zip(a.transitions, b.transitions):
        if (f.target, f.scope) != (g.target, g.scope) or not np.array_equal(f.rows, g.rows):
            return False
    for f, g in zip(a.rewards, b.rewards):
        if f.scope != g.scope or not np.array_equal(f.table, g.table):
            return False
    return True
