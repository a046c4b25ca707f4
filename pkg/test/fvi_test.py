import numpy as np
import pytest

from conftest import random_model
from fmdpy.approx.basis import NormalizationScheme, feature_matrix, indicator_basis, joint_indicator_basis
from fmdpy.approx.fvi import (PlannerConfig, avi_iterate, backup_state, compile_backups, sample_size, sample_states,
                              solve)
from fmdpy.core.space import VariableSpace, all_states
from fmdpy.env.generators import make_chain
from fmdpy.errors import ConfigError, ContractError
from fmdpy.oracle.flat import exact_vi, flatten

EXACT = PlannerConfig(epsilon=1e-7, exhaustive=True)


@pytest.mark.parametrize('seed', range(20))
def test_joint_indicator_fvi_is_exact_value_iteration(seed):
    model = random_model(seed)
    basis = joint_indicator_basis(model.space)
    result = solve(model, basis, EXACT)
    assert result.converged
    states = list(all_states(model.space))
    v_star = exact_vi(flatten(model), tol=1e-9)
    assert np.max(np.abs(feature_matrix(basis, states) @ result.weights - v_star)) <= 1e-6


@pytest.mark.parametrize('seed', range(20))
def test_residuals_decay_geometrically(seed):
    model = random_model(seed)
    result = solve(model, joint_indicator_basis(model.space), EXACT)
    assert result.converged
    tail = np.asarray(result.residuals[-11:])
    ratios = tail[1:] / tail[:-1]
    assert ratios.mean() <= model.gamma + 0.05


@pytest.mark.parametrize('scheme', list(NormalizationScheme))
def test_indicator_fvi_converges_on_chain(scheme):
    chain = make_chain(3, 3, 0.1)
    result = solve(chain, indicator_basis(chain.space), PlannerConfig(exhaustive=True, scheme=scheme))
    assert result.converged
    assert result.residual <= 0.1 * (1 - chain.gamma)
    assert len(result.residuals) == result.iterations


@pytest.mark.parametrize('seed', range(10))
def test_compiled_backups_match_reference(seed):
    model = random_model(seed)
    basis = indicator_basis(model.space)
    states = list(all_states(model.space))
    w = np.random.default_rng(seed).uniform(-1, 1, size=basis.size)
    compiled = compile_backups(model, basis, states)
    expected = [backup_state(model, basis, w, x) for x in states]
    assert np.allclose(compiled.backups(w), expected, rtol=0, atol=1e-12)


def test_sample_size_formula():
    space = VariableSpace.of((10, ) * 4)
    assert sample_size(space, PlannerConfig(epsilon=0.5, delta=0.1)) == 237
    assert sample_size(space, PlannerConfig(n1=5)) == 5
    with pytest.raises(ConfigError):
        sample_size(space, PlannerConfig(n1=0))
    with pytest.raises(ConfigError):
        sample_size(space, PlannerConfig(epsilon=0.0))


def test_sampling_is_seeded():
    space = VariableSpace.of((4, 4, 4))
    config = PlannerConfig(n1=30)
    first = sample_states(space, config, np.random.default_rng(3))
    second = sample_states(space, config, np.random.default_rng(3))
    assert first == second and len(first) == 30


def test_warm_start_shape_is_checked():
    chain = make_chain(2, 2, 0.1)
    with pytest.raises(ContractError):
        solve(chain, indicator_basis(chain.space), PlannerConfig(exhaustive=True), w0=np.zeros(2))


def test_warm_start_needs_fewer_sweeps():
    chain = make_chain(2, 2, 0.1)
    basis = indicator_basis(chain.space)
    config = PlannerConfig(exhaustive=True, epsilon=1e-6)
    first = solve(chain, basis, config)
    again = solve(chain, basis, config, w0=first.weights)
    assert again.iterations < first.iterations


def test_sweep_limit_reports_not_converged():
    chain = make_chain(2, 2, 0.1)
    result = solve(chain, indicator_basis(chain.space), PlannerConfig(exhaustive=True, max_iters=1))
    assert not result.converged
    assert result.iterations == 1


@pytest.mark.parametrize('seed', range(10))
def test_one_more_sweep_moves_less_than_the_stopping_gap(seed):
    model = random_model(seed)
    basis = joint_indicator_basis(model.space)
    config = PlannerConfig(epsilon=0.05, exhaustive=True)
    result = solve(model, basis, config)
    assert result.converged
    again = avi_iterate(model, basis, result.projection, result.weights)
    assert np.max(np.abs(again - result.weights)) <= config.epsilon * (1 - model.gamma) + 1e-12
