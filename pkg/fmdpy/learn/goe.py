"""
garden-of-Eden augmentation. every variable gains one extra value x_E (its
last value, index n_i); a reward factor per variable pays R_E when that
variable sits at x_E. base rewards and basis tables are 0 wherever any of
their scope variables is at x_E.
"""
import typing as t
from typing import NamedTuple

import numpy as np

from fmdpy.approx.basis import BasisFunction, BasisSet
from fmdpy.core.model import FmdpSpec
from fmdpy.core.space import VariableSpace
from fmdpy.core.tables import LocalTable, RewardFactor, TransitionFactor
from fmdpy.errors import ConfigError


class GoeSpec(NamedTuple):
    base: FmdpSpec
    space: VariableSpace
    rewards: t.Tuple[RewardFactor, ...]
    r_e: float
    basis: BasisSet
    r_max: float

    def goe_value(self, i: int) -> int:
        return self.base.space.sizes[i]

    def model(self, transitions: t.Sequence[TransitionFactor]) -> FmdpSpec:
        """an FMDP over the augmented space with the augmented rewards."""
        base = self.base.names()
        return FmdpSpec(
            space=self.space,
            num_actions=base.num_actions,
            transitions=tuple(transitions),
            rewards=self.rewards,
            gamma=base.gamma,
            start=base.start,
            scope_bound=base.scope_bound,
            r_max=self.r_max,
            variable_names=base.variable_names,
            action_names=base.action_names,
            reward_names=base.reward_names + tuple(f'eden_{name}' for name in base.variable_names),
        )


def lift_values(values: np.ndarray, shape: t.Sequence[int]) -> np.ndarray:
    """
    a table over `shape` re-laid over the augmented shape, 0 at every GOE
    coordinate. leading axes (e.g. actions) are kept.

    title: lift values
    prepare:
    >>> import numpy as np
    >>> from fmdpy.learn.goe import lift_values
    test:
    >>> assert lift_values(np.array([1.0, 2.0]), (2, )).tolist() == [1.0, 2.0, 0.0]
    >>> lifted = lift_values(np.arange(4.0), (2, 2))
    >>> assert lifted.tolist() == [0.0, 1.0, 0.0, 2.0, 3.0, 0.0, 0.0, 0.0, 0.0]
    >>> assert lift_values(np.array([[5.0]]), ()).tolist() == [[5.0]]
    """
    shape = tuple(shape)
    if not shape:
        return values.copy()
    lead = values.shape[:-1]
    # local indices put the first scope variable fastest, i.e. Fortran order
    grid = values.reshape(lead + shape[::-1])
    grid = np.pad(grid, [(0, 0)] * len(lead) + [(0, 1)] * len(shape))
    return grid.reshape(lead + (-1, ))


def augmented_shape(shape: t.Sequence[int]) -> t.Tuple[int, ...]:
    return tuple(n + 1 for n in shape)


def goe_augment(base: FmdpSpec, basis: BasisSet, r_e: float) -> GoeSpec:
    """
    title: augmented space
    prepare:
    >>> from fmdpy.env.generators import make_random_fmdp
    >>> from fmdpy.approx.basis import indicator_basis
    >>> from fmdpy.learn.goe import goe_augment
    test:
    >>> base = make_random_fmdp(2, 2, 2, 2, seed=0, num_rewards=1)
    >>> goe = goe_augment(base, indicator_basis(base.space), 50.0)
    >>> assert goe.space.sizes == (3, 3)
    >>> assert len(goe.rewards) == 3
    >>> assert goe.basis.size == 5 + 2
    """
    if not r_e > 0:
        raise ConfigError(f'R_E must be > 0, got {r_e}')
    space = VariableSpace.of(augmented_shape(base.space.sizes))

    rewards = [
        RewardFactor(r.scope, augmented_shape(r.shape), lift_values(r.table, r.shape)) for r in base.rewards
    ]
    for i, n in enumerate(base.space.sizes):
        table = np.zeros((base.num_actions, n + 1))
        table[:, n] = r_e
        rewards.append(RewardFactor((i, ), (n + 1, ), table))

    functions = [
        BasisFunction(h.name,
                      LocalTable(h.scope, augmented_shape(h.table.shape), lift_values(h.table.values, h.table.shape)))
        for h in basis.functions
    ]
    for i, n in enumerate(base.space.sizes):
        values = np.zeros(n + 1)
        values[n] = 1.0
        functions.append(BasisFunction(f'x{i}_eden', LocalTable((i, ), (n + 1, ), values)))

    return GoeSpec(base, space, tuple(rewards), float(r_e), BasisSet.of(functions), max(base.r_max, float(r_e)))


def goe_rows(shape: t.Sequence[int]) -> np.ndarray:
    """mask over the local rows of an augmented `shape`: True where some coordinate is x_E."""
    grid = np.zeros(tuple(shape)[::-1], dtype=bool)
    for axis in range(len(shape)):
        index = [slice(None)] * len(shape)
        index[axis] = -1
        grid[tuple(index)] = True
    return grid.reshape(-1)


def absorbing_rows(rows: np.ndarray, shape: t.Sequence[int]) -> np.ndarray:
    """(A, rows, n+1) with every GOE row replaced by a point mass on x_E."""
    rows = rows.copy()
    mask = goe_rows(shape)
    rows[:, mask, :] = 0.0
    rows[:, mask, -1] = 1.0
    return rows


def lift_true_model(goe: GoeSpec) -> FmdpSpec:
    """the true dynamics over the augmented space; GOE rows are absorbing at x_E."""
    transitions = []
    for f in goe.base.transitions:
        shape = augmented_shape(f.shape)
        # lift the row index, then give each distribution a zero x_E entry
        rows = np.moveaxis(lift_values(np.moveaxis(f.rows, 1, -1), f.shape), -1, 1)
        rows = np.pad(rows, [(0, 0), (0, 0), (0, 1)])
        transitions.append(TransitionFactor(f.target, f.scope, shape, absorbing_rows(rows, shape)))
    return goe.model(transitions)
