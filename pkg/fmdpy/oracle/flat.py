"""
brute-force ground truth: an FMDP flattened to dense per-action matrices.

    v*       = max_a (r^a + gamma P^a v*)
    w^x      = G max_a (r^a + gamma P^a H w^x)
    v~^pi    = H G sum_a pi(., a) (r^a + gamma P^a v~^pi)

only for desk-scale models; `flatten` refuses more than 2^20 states.
"""
import io
import logging
import typing as t
from typing import NamedTuple

import numpy as np

from fmdpy.core.model import FmdpSpec
from fmdpy.core.space import all_states, local_indices
from fmdpy.errors import ContractError, OracleTooLargeError

logger = logging.getLogger(__name__)

ORACLE_LIMIT = 1 << 20
ROW_SUM_TOLERANCE = 1e-9
PROJECTION_TOLERANCE = 1e-12


class FlatMdp(NamedTuple):
    num_states: int
    # (A, N, N)
    transitions: np.ndarray
    # (A, N)
    rewards: np.ndarray
    gamma: float

    @property
    def num_actions(self) -> int:
        return self.transitions.shape[0]


def flatten(model: FmdpSpec, limit: int = ORACLE_LIMIT) -> FlatMdp:
    """
    title: flatten sums to one
    prepare:
    >>> import numpy as np
    >>> from fmdpy.env.generators import make_random_fmdp
    >>> from fmdpy.oracle.flat import flatten
    test:
    >>> flat = flatten(make_random_fmdp(3, 2, 2, 3, seed=4))
    >>> assert flat.transitions.shape == (3, 8, 8)
    >>> assert np.allclose(flat.transitions.sum(axis=2), 1.0, atol=1e-12)
    """
    N = model.space.joint_size
    if N > limit:
        raise OracleTooLargeError(N, limit)
    states = np.asarray(list(all_states(model.space)), dtype=np.int64)
    P = np.empty((model.num_actions, N, N))
    r = np.zeros((model.num_actions, N))
    for a in range(model.num_actions):
        # variable 0 varies fastest in the successor index
        joint = np.ones((N, 1))
        for f in sorted(model.transitions, key=lambda f: f.target):
            rows = f.rows[a, local_indices(states, f.scope, f.shape)]
            joint = (rows[:, :, None] * joint[:, None, :]).reshape(N, -1)
        P[a] = joint
        for factor in model.rewards:
            r[a] += factor.table[a, local_indices(states, factor.scope, factor.shape)]
    logger.debug('flattened %d states x %d actions', N, model.num_actions)
    return FlatMdp(N, P, r, model.gamma)


def q_table(flat: FlatMdp, v: np.ndarray) -> np.ndarray:
    """(A, N) one-step lookahead values r^a + gamma P^a v."""
    return flat.rewards + flat.gamma * (flat.transitions @ v)


def exact_vi(flat: FlatMdp, tol: float = 1e-10) -> np.ndarray:
    """
    value iteration from zero until the sup-norm change is at most
    tol (1 - gamma) / gamma, which puts the result within tol of v*.

    title: exact value iteration
    prepare:
    >>> import numpy as np
    >>> from fmdpy.oracle.flat import FlatMdp, exact_vi
    test:
    >>> one = FlatMdp(1, np.ones((1, 1, 1)), np.ones((1, 1)), 0.5)
    >>> assert abs(exact_vi(one, 1e-9)[0] - 2.0) < 1e-9
    """
    if not tol > 0:
        raise ContractError(f'tolerance must be > 0, got {tol}')
    v = np.zeros(flat.num_states)
    if flat.gamma == 0:
        return q_table(flat, v).max(axis=0)
    stop = tol * (1 - flat.gamma) / flat.gamma
    sweeps = 0
    while True:
        v_next = q_table(flat, v).max(axis=0)
        sweeps += 1
        residual = float(np.max(np.abs(v_next - v)))
        v = v_next
        if residual <= stop:
            logger.debug('exact value iteration converged after %d sweeps', sweeps)
            return v


def greedy_policy(flat: FlatMdp, v: np.ndarray) -> np.ndarray:
    """ties go to the lowest action index."""
    return np.argmax(q_table(flat, v), axis=0)


def policy_matrix(flat: FlatMdp, policy) -> np.ndarray:
    """an (N, A) distribution per state, from either an action per state or a matrix."""
    policy = np.asarray(policy)
    if policy.ndim == 1:
        if policy.shape != (flat.num_states, ) or policy.min() < 0 or policy.max() >= flat.num_actions:
            raise ContractError('deterministic policy needs one valid action per state')
        matrix = np.zeros((flat.num_states, flat.num_actions))
        matrix[np.arange(flat.num_states), policy.astype(np.int64)] = 1.0
        return matrix
    if policy.shape != (flat.num_states, flat.num_actions):
        raise ContractError(f'policy shape {policy.shape} != {(flat.num_states, flat.num_actions)}')
    if (policy < 0).any() or np.any(np.abs(policy.sum(axis=1) - 1.0) > ROW_SUM_TOLERANCE):
        raise ContractError('policy rows must be distributions')
    return policy.astype(float)


def _follow(flat: FlatMdp, policy) -> t.Tuple[np.ndarray, np.ndarray]:
    pi = policy_matrix(flat, policy)
    P = np.einsum('xa,axy->xy', pi, flat.transitions)
    r = np.einsum('xa,ax->x', pi, flat.rewards)
    return P, r


def policy_value(flat: FlatMdp, policy) -> np.ndarray:
    """exact evaluation by a linear solve of (I - gamma P_pi) v = r_pi."""
    P, r = _follow(flat, policy)
    return np.linalg.solve(np.eye(flat.num_states) - flat.gamma * P, r)


def _check_projection(flat: FlatMdp, H: np.ndarray, G: np.ndarray):
    if H.shape[0] != flat.num_states or G.shape != (H.shape[1], flat.num_states):
        raise ContractError(f'H {H.shape} and G {G.shape} do not cover {flat.num_states} states')
    norm = float(np.max(np.abs(H @ G).sum(axis=1)))
    if norm > 1.0 + PROJECTION_TOLERANCE:
        raise ContractError(f'||HG||_inf = {norm:.15g} exceeds 1')


def exact_avi_fixed_point(flat: FlatMdp, H: np.ndarray, G: np.ndarray, tol: float = 1e-10,
                          max_iters: int = 1000000) -> np.ndarray:
    """
    the AVI-optimal weights, iterating over every state until the weights
    move by at most tol.

    title: constant basis fixed point
    prepare:
    >>> import numpy as np
    >>> from fmdpy.oracle.flat import FlatMdp, exact_avi_fixed_point
    test:
    >>> one = FlatMdp(1, np.ones((1, 1, 1)), np.ones((1, 1)), 0.5)
    >>> w = exact_avi_fixed_point(one, np.ones((1, 1)), np.ones((1, 1)), 1e-12)
    >>> assert abs(w[0] - 2.0) < 1e-9
    """
    _check_projection(flat, H, G)
    w = np.zeros(H.shape[1])
    for sweep in range(1, max_iters + 1):
        w_next = G @ q_table(flat, H @ w).max(axis=0)
        residual = float(np.max(np.abs(w_next - w)))
        w = w_next
        if residual <= tol:
            logger.debug('AVI fixed point after %d sweeps', sweep)
            return w
    raise ContractError(f'AVI did not reach tolerance {tol} in {max_iters} sweeps')


def approx_policy_value(flat: FlatMdp, H: np.ndarray, G: np.ndarray, policy, tol: float = 1e-10,
                        max_iters: int = 1000000) -> np.ndarray:
    _check_projection(flat, H, G)
    P, r = _follow(flat, policy)
    HG = H @ G
    v = np.zeros(flat.num_states)
    for _ in range(max_iters):
        v_next = HG @ (r + flat.gamma * (P @ v))
        residual = float(np.max(np.abs(v_next - v)))
        v = v_next
        if residual <= tol:
            return v
    raise ContractError(f'policy evaluation did not reach tolerance {tol} in {max_iters} sweeps')


def l1_model_distance(flat_a: FlatMdp, flat_b: FlatMdp) -> np.ndarray:
    """(N, A) table of sum_y |P_a(y | x) - P_b(y | x)|."""
    if flat_a.transitions.shape != flat_b.transitions.shape:
        raise ContractError(f'shape mismatch: {flat_a.transitions.shape} vs {flat_b.transitions.shape}')
    return np.abs(flat_a.transitions - flat_b.transitions).sum(axis=2).T


def export_flat(flat: FlatMdp) -> str:
    """
    plain-text dump: a header, then per action its reward row and the
    transition matrix row-major.
    """
    out = io.StringIO()
    out.write(f'states {flat.num_states}\nactions {flat.num_actions}\ngamma {flat.gamma:.12g}\n')
    for a in range(flat.num_actions):
        out.write(f'\naction {a}\nreward\n')
        out.write(' '.join(f'{v:.12g}' for v in flat.rewards[a]) + '\n')
        out.write('transition\n')
        for row in flat.transitions[a]:
            out.write(' '.join(f'{v:.12g}' for v in row) + '\n')
    return out.getvalue()
