import numpy as np
import pytest

from conftest import random_model
from fmdpy.approx.basis import feature_matrix, indicator_basis
from fmdpy.approx.fvi import backup_state
from fmdpy.core.model import (ViolationKind, reward, specs_equal, successor_distribution, transition_prob,
                              validate_model)
from fmdpy.core.space import (VariableSpace, all_states, as_scope, index_state, local_index, local_indices,
                              state_index)
from fmdpy.core.tables import LocalTable, extend, extend_lookup
from fmdpy.env.generators import make_random_fmdp
from fmdpy.errors import InvalidSpaceError, InvalidStateError
from fmdpy.oracle.flat import flatten

SEEDS = range(100)


def test_flat_index_convention():
    space = VariableSpace.of((2, 3, 2))
    states = list(all_states(space))
    assert len(states) == 12
    assert [state_index(x, space) for x in states] == list(range(12))
    assert states[1] == (1, 0, 0)
    assert index_state(7, space) == (1, 0, 1)


def test_invalid_states_and_spaces():
    space = VariableSpace.of((2, 2))
    with pytest.raises(InvalidStateError):
        state_index((2, 0), space)
    with pytest.raises(InvalidStateError):
        state_index((0, ), space)
    with pytest.raises(InvalidSpaceError):
        VariableSpace.of((2, 0))
    with pytest.raises(InvalidSpaceError):
        VariableSpace.of((1 << 21, 1 << 21))
    with pytest.raises(InvalidSpaceError):
        as_scope((1, 0), space)


def test_local_indices_match_local_index():
    space = VariableSpace.of((3, 2, 4))
    states = np.asarray(list(all_states(space)))
    for scope in [(), (0, ), (2, ), (0, 2), (0, 1, 2)]:
        shape = space.scope_sizes(scope)
        expected = [local_index(x, scope, shape) for x in states]
        assert local_indices(states, scope, shape).tolist() == expected


def test_extension_agrees_with_lookup():
    space = VariableSpace.of((2, 3, 2))
    f = LocalTable.over((0, 2), space, np.arange(4.0))
    extended = extend(f, space)
    for x in all_states(space):
        assert extended[state_index(x, space)] == extend_lookup(f, x)


@pytest.mark.parametrize('seed', SEEDS)
def test_factored_agrees_with_flattened(seed):
    model = random_model(seed)
    flat = flatten(model)
    states = list(all_states(model.space))
    basis = indicator_basis(model.space)
    rng = np.random.default_rng(seed)
    w = rng.normal(size=basis.size)
    v = feature_matrix(basis, states) @ w

    for x in states:
        i = state_index(x, model.space)
        for a in range(model.num_actions):
            assert abs(reward(model, x, a) - flat.rewards[a, i]) <= 1e-12
            assert np.allclose(successor_distribution(model, x, a), flat.transitions[a, i], rtol=0, atol=1e-12)
        expected = max(flat.rewards[a, i] + model.gamma * flat.transitions[a, i] @ v
                       for a in range(model.num_actions))
        assert abs(backup_state(model, basis, w, x) - expected) <= 1e-12

    for _ in range(20):
        x = states[rng.integers(len(states))]
        y = states[rng.integers(len(states))]
        a = int(rng.integers(model.num_actions))
        p = transition_prob(model, x, a, y)
        assert abs(p - flat.transitions[a, state_index(x, model.space), state_index(y, model.space)]) <= 1e-12


@pytest.mark.parametrize('seed', range(10))
def test_successor_distribution_sums_to_one(seed):
    model = random_model(seed)
    for x in all_states(model.space):
        assert abs(successor_distribution(model, x, 0).sum() - 1.0) <= 1e-12


def test_validate_model_reports_scope_bound_and_start():
    model = random_model(3)._replace(scope_bound=0)
    kinds = {v.kind for v in validate_model(model)}
    assert ViolationKind.SCOPE_BOUND in kinds
    bad_start = random_model(3)._replace(start=(99, ) * random_model(3).m)
    assert [v.kind for v in validate_model(bad_start)] == [ViolationKind.START_STATE]


def test_validate_model_gamma_range():
    model = random_model(4)._replace(gamma=1.0)
    assert [v.kind for v in validate_model(model)] == [ViolationKind.GAMMA_RANGE]


def test_specs_equal_is_structural():
    assert specs_equal(random_model(5), random_model(5))
    other = random_model(5)._replace(gamma=0.5)
    assert not specs_equal(random_model(5), other)


def test_validate_model_requires_factors_in_target_order():
    model = make_random_fmdp(2, (2, 3), 2, 2, seed=4)
    reordered = model._replace(transitions=model.transitions[::-1])
    assert [v.kind for v in validate_model(reordered)] == [ViolationKind.FACTOR_COUNT]
    assert validate_model(model) == []
