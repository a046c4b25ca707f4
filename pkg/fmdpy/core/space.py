"""
variable spaces, scopes and the flat-index convention.

flat indices are mixed radix with variable 0 the least significant digit;
local indices over a scope follow the same rule with the scope's first
variable least significant.
"""
import itertools
import math
import typing as t
from typing import NamedTuple, Tuple

import numpy as np

from fmdpy.errors import InvalidSpaceError, InvalidStateError

MAX_JOINT_SIZE = 1 << 40

Scope = Tuple[int, ...]
StateAssignment = Tuple[int, ...]


class VariableSpace(NamedTuple):
    sizes: Tuple[int, ...]

    @classmethod
    def of(cls, sizes: t.Iterable[int]) -> 'VariableSpace':
        sizes = tuple(int(n) for n in sizes)
        if not sizes:
            raise InvalidSpaceError('a variable space needs at least one variable')
        if any(n < 1 for n in sizes):
            raise InvalidSpaceError(f'variable sizes must be >= 1, got {sizes}')
        if math.prod(sizes) > MAX_JOINT_SIZE:
            raise InvalidSpaceError(f'joint size of {sizes} exceeds 2^40')
        return cls(sizes)

    @property
    def m(self) -> int:
        return len(self.sizes)

    @property
    def joint_size(self) -> int:
        return math.prod(self.sizes)

    def scope_sizes(self, scope: Scope) -> Tuple[int, ...]:
        return tuple(self.sizes[i] for i in scope)

    def scope_size(self, scope: Scope) -> int:
        return math.prod(self.scope_sizes(scope))


def as_scope(indices: t.Iterable[int], space: VariableSpace) -> Scope:
    scope = tuple(int(i) for i in indices)
    if any(b <= a for a, b in zip(scope, scope[1:])):
        raise InvalidSpaceError(f'scope {scope} is not strictly increasing')
    if scope and (scope[0] < 0 or scope[-1] >= space.m):
        raise InvalidSpaceError(f'scope {scope} out of range for {space.m} variables')
    return scope


def check_state(x: t.Sequence[int], space: VariableSpace) -> StateAssignment:
    x = tuple(x)
    if len(x) != space.m:
        raise InvalidStateError(x, f'expected {space.m} components, got {len(x)}')
    for i, (v, n) in enumerate(zip(x, space.sizes)):
        if not 0 <= v < n:
            raise InvalidStateError(x, f'component {i} = {v} not in [0, {n})')
    return x


def mixed_radix(values: t.Sequence[int], radices: t.Sequence[int]) -> int:
    index = 0
    for v, n in zip(reversed(values), reversed(radices)):
        index = index * n + v
    return index


def unmix_radix(index: int, radices: t.Sequence[int]) -> Tuple[int, ...]:
    values = []
    for n in radices:
        index, v = divmod(index, n)
        values.append(v)
    return tuple(values)


def state_index(x: t.Sequence[int], space: VariableSpace) -> int:
    """
    title: state index
    prepare:
    >>> from fmdpy.core.space import VariableSpace, state_index, index_state
    test:
    >>> space = VariableSpace.of((3, 3))
    >>> assert state_index((0, 0), space) == 0
    >>> assert state_index((1, 2), space) == 7
    >>> cube = VariableSpace.of((2, 2, 2))
    >>> for i in range(8):
    >>>     assert state_index(index_state(i, cube), cube) == i
    """
    return mixed_radix(check_state(x, space), space.sizes)


def index_state(index: int, space: VariableSpace) -> StateAssignment:
    if not 0 <= index < space.joint_size:
        raise InvalidStateError((index, ), f'flat index not in [0, {space.joint_size})')
    return unmix_radix(index, space.sizes)


def local_index(x: t.Sequence[int], scope: Scope, shape: t.Sequence[int]) -> int:
    """position of x[scope] inside a table laid out over `shape`."""
    index = 0
    for i, n in zip(reversed(scope), reversed(shape)):
        index = index * n + x[i]
    return index


def all_states(space: VariableSpace) -> t.Iterator[StateAssignment]:
    """every joint state in flat-index order."""
    for reversed_state in itertools.product(*(range(n) for n in reversed(space.sizes))):
        yield reversed_state[::-1]


def local_indices(states: np.ndarray, scope: Scope, shape: t.Sequence[int]) -> np.ndarray:
    """`local_index` for every row of an (count, m) integer array of states."""
    index = np.zeros(len(states), dtype=np.int64)
    for i, n in zip(reversed(scope), reversed(shape)):
        index = index * n + states[:, i]
    return index
