"""
local-scope tables.

    LocalTable        f : X[Z] -> R
    TransitionFactor  P_i(y_i | x[Gamma_i], a), rows indexed (action, local index)
    RewardFactor      R_j(x[Z_j], a)

all tables are dense numpy arrays laid out by `fmdpy.core.space.local_index`.
"""
import typing as t
from typing import NamedTuple, Tuple

import numpy as np

from fmdpy.core.space import Scope, StateAssignment, VariableSpace, all_states, local_index


class LocalTable(NamedTuple):
    scope: Scope
    shape: Tuple[int, ...]
    values: np.ndarray

    @classmethod
    def over(cls, scope: Scope, space: VariableSpace, values) -> 'LocalTable':
        shape = space.scope_sizes(scope)
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.size != int(np.prod(shape, dtype=np.int64)):
            raise ValueError(f'table over {scope} needs {int(np.prod(shape))} values, got {values.size}')
        return cls(tuple(scope), shape, values)

    def __call__(self, x: t.Sequence[int]) -> float:
        return extend_lookup(self, x)


class TransitionFactor(NamedTuple):
    target: int
    scope: Scope
    shape: Tuple[int, ...]
    # (actions, rows, |X_target|)
    rows: np.ndarray

    @property
    def num_rows(self) -> int:
        return self.rows.shape[1]

    def row(self, x: t.Sequence[int], a: int) -> np.ndarray:
        return self.rows[a, local_index(x, self.scope, self.shape)]


class RewardFactor(NamedTuple):
    scope: Scope
    shape: Tuple[int, ...]
    # (actions, rows)
    table: np.ndarray

    def at(self, x: t.Sequence[int], a: int) -> float:
        return self.table[a, local_index(x, self.scope, self.shape)]


def extend_lookup(f: LocalTable, x: StateAssignment) -> float:
    """
    value of the extension of f at a full state, i.e. f(x[scope]).

    title: extend lookup
    prepare:
    >>> from fmdpy.core.space import VariableSpace
    >>> from fmdpy.core.tables import LocalTable, extend_lookup
    test:
    >>> space = VariableSpace.of((2, 5))
    >>> f = LocalTable.over((0, ), space, [1.0, 2.0])
    >>> assert extend_lookup(f, (1, 3)) == 2.0
    >>> assert extend_lookup(f, (1, 0)) == 2.0
    >>> g = LocalTable.over((0, 1), space, range(10))
    >>> assert extend_lookup(g, (1, 2)) == 5.0
    """
    return float(f.values[local_index(x, f.scope, f.shape)])


def extension_matrix(scope: Scope, space: VariableSpace) -> np.ndarray:
    """the explicit N x |X[scope]| 0/1 matrix ext{scope}."""
    shape = space.scope_sizes(scope)
    ext = np.zeros((space.joint_size, int(np.prod(shape, dtype=np.int64))))
    for row, x in enumerate(all_states(space)):
        ext[row, local_index(x, scope, shape)] = 1.0
    return ext


def extend(f: LocalTable, space: VariableSpace) -> np.ndarray:
    return extension_matrix(f.scope, space) @ f.values
