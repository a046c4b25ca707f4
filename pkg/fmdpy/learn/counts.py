"""
visit and transition counts per component (x[Gamma_i], a), seeded with one
fake transition into x_E. GOE rows are never observed, so they stay absorbing.
"""
import typing as t
from typing import NamedTuple, Tuple

import numpy as np

from fmdpy.core.model import FmdpSpec
from fmdpy.core.space import Scope, StateAssignment, local_index
from fmdpy.core.tables import TransitionFactor
from fmdpy.errors import ContractError
from fmdpy.learn.goe import GoeSpec, augmented_shape, goe_rows, lift_true_model


class CountsModel(NamedTuple):
    # augmented variable sizes
    sizes: Tuple[int, ...]
    scopes: Tuple[Scope, ...]
    shapes: Tuple[Tuple[int, ...], ...]
    # per factor, (A, rows, n_i + 1)
    transition_counts: Tuple[np.ndarray, ...]
    # per factor, (A, rows)
    visit_counts: Tuple[np.ndarray, ...]

    @property
    def total_visits(self) -> int:
        return int(sum(vc.sum() for vc in self.visit_counts))

    def real_visits(self, i: int) -> np.ndarray:
        return self.visit_counts[i] - 1


def init_counts(goe: GoeSpec) -> CountsModel:
    """
    title: fake experience
    prepare:
    >>> from fmdpy.env.generators import make_chain
    >>> from fmdpy.approx.basis import indicator_basis
    >>> from fmdpy.learn.goe import goe_augment
    >>> from fmdpy.learn.counts import init_counts
    test:
    >>> chain = make_chain(2, 2, 0.1)
    >>> counts = init_counts(goe_augment(chain, indicator_basis(chain.space), 10.0))
    >>> assert counts.total_visits == 2 * 3 + 2 * 9
    >>> assert all((tc.sum(axis=2) == vc).all() for tc, vc in zip(counts.transition_counts, counts.visit_counts))
    """
    scopes, shapes, tcs, vcs = [], [], [], []
    for f in goe.base.transitions:
        shape = augmented_shape(f.shape)
        rows = int(np.prod(shape, dtype=np.int64))
        tc = np.zeros((goe.base.num_actions, rows, goe.space.sizes[f.target]), dtype=np.int64)
        tc[:, :, -1] = 1
        scopes.append(f.scope)
        shapes.append(shape)
        tcs.append(tc)
        vcs.append(np.ones((goe.base.num_actions, rows), dtype=np.int64))
    return CountsModel(goe.space.sizes, tuple(scopes), tuple(shapes), tuple(tcs), tuple(vcs))


def _check_real(x: StateAssignment, sizes: t.Sequence[int], what: str):
    if len(x) != len(sizes):
        raise ContractError(f'{what} {x} has {len(x)} components, expected {len(sizes)}')
    for i, (v, n) in enumerate(zip(x, sizes)):
        if v == n - 1:
            raise ContractError(f'{what} {x} has component {i} in the garden of Eden')
        if not 0 <= v < n - 1:
            raise ContractError(f'{what} {x} has component {i} out of range')


def observe(counts: CountsModel, x: StateAssignment, a: int, y: StateAssignment) -> CountsModel:
    """the counts after one real transition x -a-> y; the input is left unchanged."""
    _check_real(x, counts.sizes, 'state')
    _check_real(y, counts.sizes, 'successor')
    tcs, vcs = [], []
    for i, (scope, shape) in enumerate(zip(counts.scopes, counts.shapes)):
        row = local_index(x, scope, shape)
        tc = counts.transition_counts[i].copy()
        vc = counts.visit_counts[i].copy()
        tc[a, row, y[i]] += 1
        vc[a, row] += 1
        tcs.append(tc)
        vcs.append(vc)
    return counts._replace(transition_counts=tuple(tcs), visit_counts=tuple(vcs))


def current_model(counts: CountsModel, goe: GoeSpec) -> FmdpSpec:
    """
    the empirical optimistic model, rows TransitionCount / VisitCount.

    title: mixing with the garden of Eden
    prepare:
    >>> from fmdpy.env.generators import make_chain
    >>> from fmdpy.approx.basis import indicator_basis
    >>> from fmdpy.learn.goe import goe_augment
    >>> from fmdpy.learn.counts import init_counts, observe, current_model
    test:
    >>> chain = make_chain(1, 2, 0.0)
    >>> goe = goe_augment(chain, indicator_basis(chain.space), 10.0)
    >>> counts = init_counts(goe)
    >>> assert current_model(counts, goe).transitions[0].row((0, ), 1).tolist() == [0.0, 0.0, 1.0]
    >>> counts = observe(counts, (0, ), 1, (1, ))
    >>> assert current_model(counts, goe).transitions[0].row((0, ), 1).tolist() == [0.0, 0.5, 0.5]
    """
    factors = [
        TransitionFactor(i, scope, shape, tc / vc[:, :, None])
        for i, (scope, shape, tc, vc) in enumerate(
            zip(counts.scopes, counts.shapes, counts.transition_counts, counts.visit_counts))
    ]
    return goe.model(factors)


def known_components(counts: CountsModel, threshold: int) -> Tuple[np.ndarray, ...]:
    """per factor an (A, rows) mask of real components with at least `threshold` real visits."""
    return tuple((counts.real_visits(i) >= threshold) & ~goe_rows(shape)[None, :]
                 for i, shape in enumerate(counts.shapes))


def known_fraction(counts: CountsModel, threshold: int) -> float:
    known = total = 0
    for mask, shape in zip(known_components(counts, threshold), counts.shapes):
        known += int(mask.sum())
        total += int((~goe_rows(shape)).sum()) * mask.shape[0]
    return known / total


def known_state_fmdp(goe: GoeSpec, counts: CountsModel, threshold: int) -> FmdpSpec:
    """
    the known-component model over the augmented space: empirical rows where
    the component is known, the true rows of `goe.base` elsewhere. GOE rows
    stay absorbing.
    """
    truth = lift_true_model(goe)
    empirical = current_model(counts, goe)
    factors = []
    for mask, f, g in zip(known_components(counts, threshold), truth.transitions, empirical.transitions):
        rows = np.where(mask[:, :, None], g.rows, f.rows)
        factors.append(f._replace(rows=rows))
    return goe.model(factors)
