"""
local-scope basis functions and the normalized projection on a state sample.

    V(x)  = sum_k w_k h_k(x[C_k])
    H     : rows are feature vectors of the sampled states
    G     : proportional to H^T, scaled so that ||H G||_inf <= 1

basis values are nonnegative, so H G is nonnegative and its induced inf-norm
is its largest row sum; that lets the norm be computed as H (G 1) without
forming the N1 x N1 product.
"""
import logging
import typing as t
from enum import Enum
from typing import NamedTuple, Tuple

import numpy as np

from fmdpy.core.space import Scope, StateAssignment, VariableSpace, all_states, local_index, local_indices
from fmdpy.core.tables import LocalTable
from fmdpy.errors import ContractError, DegenerateBasisError, InvalidSpaceError

logger = logging.getLogger(__name__)

PROJECTION_TOLERANCE = 1e-12
JOINT_INDICATOR_LIMIT = 1 << 12


class BasisFunction(NamedTuple):
    name: str
    table: LocalTable

    @property
    def scope(self) -> Scope:
        return self.table.scope


class BasisSet(NamedTuple):
    functions: Tuple[BasisFunction, ...]
    has_constant: bool

    @property
    def size(self) -> int:
        return len(self.functions)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(h.name for h in self.functions)

    @classmethod
    def of(cls, functions: t.Iterable[BasisFunction]) -> 'BasisSet':
        functions = tuple(functions)
        if not functions:
            raise DegenerateBasisError('a basis needs at least one function')
        for h in functions:
            values = h.table.values
            if not np.all(np.isfinite(values)) or (values < 0).any():
                raise DegenerateBasisError(f'basis function {h.name} has negative or non-finite values')
            if not values.any():
                raise DegenerateBasisError(f'basis function {h.name} is identically zero')
        has_constant = any(not h.scope and h.table.values[0] == 1.0 for h in functions)
        return cls(functions, has_constant)


class NormalizationScheme(Enum):
    # G = H^T / ||H H^T||_inf
    GLOBAL = 'global'
    # row k of H^T divided by the k-th row sum of H^T H, then a global rescale if still needed
    LITERAL = 'literal'


class ProjectionOnSample(NamedTuple):
    states: Tuple[StateAssignment, ...]
    features: np.ndarray
    projection: np.ndarray
    scheme: NormalizationScheme
    constants: np.ndarray

    @property
    def num_states(self) -> int:
        return len(self.states)


def constant_basis() -> BasisSet:
    return BasisSet.of([BasisFunction('one', LocalTable((), (), np.ones(1)))])


def indicator_basis(space: VariableSpace, include_constant: bool = True) -> BasisSet:
    """
    the default basis: the constant plus one indicator per (variable, value).

    title: indicator basis
    prepare:
    >>> from fmdpy.core.space import VariableSpace
    >>> from fmdpy.approx.basis import indicator_basis, feature_vector
    test:
    >>> basis = indicator_basis(VariableSpace.of((2, 3)))
    >>> assert basis.size == 6 and basis.has_constant
    >>> assert feature_vector(basis, (1, 2)).tolist() == [1, 0, 1, 0, 0, 1]
    """
    functions = [BasisFunction('one', LocalTable((), (), np.ones(1)))] if include_constant else []
    for i, n in enumerate(space.sizes):
        for v in range(n):
            values = np.zeros(n)
            values[v] = 1.0
            functions.append(BasisFunction(f'x{i}_eq_{v}', LocalTable((i, ), (n, ), values)))
    return BasisSet.of(functions)


def joint_indicator_basis(space: VariableSpace) -> BasisSet:
    """one indicator per joint state, in flat-index order; H is the identity."""
    if space.joint_size > JOINT_INDICATOR_LIMIT:
        raise InvalidSpaceError(f'joint indicator basis over {space.joint_size} states is too large')
    scope = tuple(range(space.m))
    functions = []
    for k in range(space.joint_size):
        values = np.zeros(space.joint_size)
        values[k] = 1.0
        functions.append(BasisFunction(f'state{k}', LocalTable(scope, space.sizes, values)))
    return BasisSet.of(functions)


def feature_vector(basis: BasisSet, x: StateAssignment) -> np.ndarray:
    return np.array([h.table.values[local_index(x, h.scope, h.table.shape)] for h in basis.functions])


def feature_matrix(basis: BasisSet, states: t.Sequence[StateAssignment]) -> np.ndarray:
    """
    the (len(states), K) matrix whose rows are feature vectors.

    title: feature matrix
    prepare:
    >>> from fmdpy.core.space import VariableSpace, all_states
    >>> from fmdpy.approx.basis import joint_indicator_basis, feature_matrix
    >>> import numpy as np
    test:
    >>> space = VariableSpace.of((2, 3))
    >>> H = feature_matrix(joint_indicator_basis(space), list(all_states(space)))
    >>> assert np.array_equal(H, np.eye(6))
    """
    array = np.asarray(states, dtype=np.int64).reshape(len(states), -1)
    H = np.empty((len(states), basis.size))
    for k, h in enumerate(basis.functions):
        H[:, k] = h.table.values[local_indices(array, h.scope, h.table.shape)]
    return H


def value_at(basis: BasisSet, w: np.ndarray, x: StateAssignment) -> float:
    return float(feature_vector(basis, x) @ w)


def _row_sum_norm(H: np.ndarray, G: np.ndarray) -> float:
    return float(np.max(H @ G.sum(axis=1))) if H.size else 0.0


def build_projection(basis: BasisSet,
                     sample: t.Sequence[StateAssignment],
                     scheme: NormalizationScheme = NormalizationScheme.GLOBAL) -> ProjectionOnSample:
    """
    title: constant basis projection averages
    prepare:
    >>> import numpy as np
    >>> from fmdpy.approx.basis import constant_basis, build_projection, project
    test:
    >>> proj = build_projection(constant_basis(), [(0, ), (1, ), (1, ), (2, )])
    >>> assert np.allclose(proj.features @ proj.projection, 0.25)
    >>> assert abs(project(proj, np.array([1.0, 2.0, 3.0, 6.0]))[0] - 3.0) < 1e-12
    """
    if len(sample) == 0:
        raise ContractError('cannot project on an empty sample')
    states = tuple(tuple(int(v) for v in x) for x in sample)
    H = feature_matrix(basis, states)
    empty = np.flatnonzero(~H.any(axis=0))
    if empty.size:
        names = ', '.join(basis.functions[k].name for k in empty)
        raise DegenerateBasisError(f'features vanish on every sampled state: {names}')

    if scheme is NormalizationScheme.GLOBAL:
        scale = float(np.max(H @ H.sum(axis=0)))
        constants = np.full(basis.size, scale)
    else:
        constants = (H.T @ H).sum(axis=1)
    G = H.T / constants[:, None]

    norm = _row_sum_norm(H, G)
    if norm > 1.0 + PROJECTION_TOLERANCE:
        logger.debug('rescaling %s projection, ||HG|| = %.6g', scheme.name, norm)
        G = G / norm
        constants = constants * norm
    return ProjectionOnSample(states, H, G, scheme, constants)


def project(proj: ProjectionOnSample, v_on_sample: np.ndarray) -> np.ndarray:
    v_on_sample = np.asarray(v_on_sample, dtype=float)
    if v_on_sample.shape != (proj.num_states, ):
        raise ContractError(f'expected {proj.num_states} sampled values, got shape {v_on_sample.shape}')
    return proj.projection @ v_on_sample


def projection_norm(proj: ProjectionOnSample) -> float:
    """||H G||_inf on the sample."""
    return _row_sum_norm(proj.features, proj.projection)


def full_projection(basis: BasisSet,
                    space: VariableSpace,
                    scheme: NormalizationScheme = NormalizationScheme.GLOBAL) -> ProjectionOnSample:
    """the projection over every joint state, giving H_full and G_full."""
    return build_projection(basis, list(all_states(space)), scheme)
