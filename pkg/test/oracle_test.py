import numpy as np
import pytest

from conftest import random_model
from fmdpy.approx.basis import full_projection, indicator_basis
from fmdpy.env.generators import make_chain, make_random_fmdp, make_sysadmin_ring
from fmdpy.errors import ContractError, OracleTooLargeError
from fmdpy.harness.runs import read_document
from fmdpy.learn.theory import accuracy_radius, v0_bound
from fmdpy.oracle.flat import (FlatMdp, approx_policy_value, exact_avi_fixed_point, exact_vi, export_flat, flatten,
                               greedy_policy, l1_model_distance, policy_matrix, policy_value, q_table)


@pytest.mark.parametrize('seed', range(10))
def test_greedy_policy_of_optimal_values_is_optimal(seed):
    flat = flatten(random_model(seed))
    v = exact_vi(flat, tol=1e-10)
    assert np.max(np.abs(policy_value(flat, greedy_policy(flat, v)) - v)) <= 1e-8
    assert np.allclose(q_table(flat, v).max(axis=0), v, atol=1e-9)


@pytest.mark.parametrize('seed', range(10))
def test_avi_with_indicators_matches_vi_on_joint_space(seed):
    model = random_model(seed)
    flat = flatten(model)
    H = np.eye(flat.num_states)
    w = exact_avi_fixed_point(flat, H, H, tol=1e-11)
    assert np.max(np.abs(w - exact_vi(flat, tol=1e-10))) <= 1e-8


def _perturbed(flat: FlatMdp, rng: np.random.Generator, budget: float) -> FlatMdp:
    """every row moved towards a random distribution by at most `budget` in L1."""
    other = rng.dirichlet(np.ones(flat.num_states), size=(flat.num_actions, flat.num_states))
    mix = budget / 2
    return flat._replace(transitions=(1 - mix) * flat.transitions + mix * other)


@pytest.mark.parametrize('seed', range(50))
def test_approximate_policy_values_stay_close_under_small_model_errors(seed):
    rng = np.random.default_rng(seed)
    model = random_model(seed)
    flat = flatten(model)
    proj = full_projection(indicator_basis(model.space), model.space)
    epsilon = 0.1
    v0 = v0_bound(float(flat.rewards.max()), flat.gamma)
    budget = epsilon * (1 - flat.gamma) / (flat.gamma * v0)
    other = _perturbed(flat, rng, budget)
    assert l1_model_distance(flat, other).max() <= budget + 1e-12

    policy = rng.integers(flat.num_actions, size=flat.num_states)
    v = approx_policy_value(flat, proj.features, proj.projection, policy, tol=1e-12)
    v_other = approx_policy_value(other, proj.features, proj.projection, policy, tol=1e-12)
    assert np.max(np.abs(v - v_other)) <= epsilon + 1e-9


@pytest.mark.parametrize('k', [10, 100, 1000])
def test_empirical_rows_concentrate(k):
    rng = np.random.default_rng(k)
    delta1, n, trials = 0.1, 3, 200
    radius = accuracy_radius(k, delta1, n)
    failures = 0
    for _ in range(trials):
        p = rng.dirichlet(np.ones(n))
        empirical = rng.multinomial(k, p) / k
        failures += np.abs(empirical - p).sum() > radius
    sigma = np.sqrt(delta1 * (1 - delta1) / trials)
    assert failures / trials <= delta1 + 3 * sigma


def test_deterministic_swap_flattens_to_a_permutation(swap_document):
    flat = flatten(read_document(swap_document).model)
    P = flat.transitions[0]
    assert np.array_equal(P.sum(axis=0), np.ones(4))
    assert np.array_equal(P.sum(axis=1), np.ones(4))
    assert set(np.unique(P)) == {0.0, 1.0}
    # (a, b) -> (b, a): flat index a + 2b -> b + 2a
    assert P[1, 2] == 1.0 and P[2, 1] == 1.0 and P[0, 0] == 1.0 and P[3, 3] == 1.0


def test_size_guard():
    with pytest.raises(OracleTooLargeError):
        flatten(random_model(1), limit=0)


def test_policy_matrix_checks_rows():
    flat = flatten(random_model(2))
    with pytest.raises(ContractError):
        policy_matrix(flat, np.full(flat.num_states, flat.num_actions))
    with pytest.raises(ContractError):
        policy_matrix(flat, np.zeros((flat.num_states, flat.num_actions)))


def test_fixed_point_refuses_expanding_projection():
    flat = FlatMdp(1, np.ones((1, 1, 1)), np.ones((1, 1)), 0.5)
    with pytest.raises(ContractError):
        exact_avi_fixed_point(flat, np.ones((1, 1)), 2 * np.ones((1, 1)))


def test_export_flat_header():
    flat = FlatMdp(1, np.ones((1, 1, 1)), np.ones((1, 1)), 0.5)
    text = export_flat(flat)
    assert text.startswith('states 1\nactions 1\ngamma 0.5\n')
    assert text.endswith('transition\n1\n')


@pytest.mark.parametrize('seed', range(20))
def test_values_stay_inside_the_value_bound(seed):
    rng = np.random.default_rng(seed)
    model = random_model(seed)
    flat = flatten(model)
    proj = full_projection(indicator_basis(model.space), model.space)
    H, G = proj.features, proj.projection
    v0 = v0_bound(float(np.abs(flat.rewards).max()), flat.gamma)

    assert np.abs(exact_vi(flat)).max() <= v0
    assert np.abs(H @ exact_avi_fixed_point(flat, H, G)).max() <= v0
    policy = rng.integers(flat.num_actions, size=flat.num_states)
    assert np.abs(approx_policy_value(flat, H, G, policy)).max() <= v0


@pytest.mark.parametrize('seed', range(20))
def test_fixed_point_error_is_bounded_by_the_projection_error(seed):
    model = random_model(seed)
    flat = flatten(model)
    proj = full_projection(indicator_basis(model.space), model.space)
    H, G = proj.features, proj.projection
    v_star = exact_vi(flat, tol=1e-11)
    v_fixed = H @ exact_avi_fixed_point(flat, H, G, tol=1e-11)
    projection_error = np.abs(H @ (G @ v_star) - v_star).max()
    assert np.abs(v_fixed - v_star).max() <= projection_error / (1 - flat.gamma) + 1e-6


@pytest.mark.parametrize('m, n, expected', [
    (1, 3, [0.81, 0.9, 1.0]),
    (2, 2, [0.81, 0.9, 1.0, 1.0]),
])
def test_deterministic_chain_values(m, n, expected):
    # distance to a paying state d gives gamma^d r_max / (1 - gamma)
    flat = flatten(make_chain(m, n, 0.0, gamma=0.9))
    assert exact_vi(flat, tol=1e-12) == pytest.approx(np.array(expected) / 0.1, abs=1e-8)


def test_rebooting_beats_doing_nothing():
    ring = make_sysadmin_ring(3, 0.05, 0.9)
    flat = flatten(ring)
    all_up = 7
    idle = policy_value(flat, np.full(flat.num_states, 3))
    best = exact_vi(flat, tol=1e-12)
    assert best[all_up] > idle[all_up] + 1e-3


def _mix_factor(model, i, rng, weight):
    factor = model.transitions[i]
    other = rng.dirichlet(np.ones(factor.rows.shape[-1]), size=factor.rows.shape[:-1])
    moved = factor._replace(rows=(1 - weight) * factor.rows + weight * other)
    return model._replace(transitions=model.transitions[:i] + (moved, ) + model.transitions[i + 1:])


@pytest.mark.parametrize('seed', range(20))
def test_factor_errors_add_up_in_the_flat_rows(seed):
    rng = np.random.default_rng(seed)
    model = make_random_fmdp(2, 2, 2, 2, seed=seed)
    epsilon = 0.2
    one = _mix_factor(model, 0, rng, epsilon / 2)
    both = _mix_factor(one, 1, rng, epsilon / 2)
    assert l1_model_distance(flatten(model), flatten(one)).max() <= epsilon + 1e-12
    assert l1_model_distance(flatten(model), flatten(both)).max() <= 2 * epsilon + 1e-12
