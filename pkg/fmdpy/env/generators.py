"""
benchmark FMDP generators. each is a pure function of its arguments.
"""
import typing as t

import numpy as np

from fmdpy.core.model import FmdpSpec
from fmdpy.core.space import VariableSpace, all_states
from fmdpy.core.tables import RewardFactor, TransitionFactor
from fmdpy.errors import ConfigError


def _factor(space: VariableSpace, target: int, scope, num_actions: int,
            row_of: t.Callable[[tuple, int], np.ndarray]) -> TransitionFactor:
    scope = tuple(scope)
    local_space = VariableSpace.of(space.scope_sizes(scope)) if scope else None
    shape = space.scope_sizes(scope)
    rows = np.zeros((num_actions, space.scope_size(scope), space.sizes[target]))
    locals_ = list(all_states(local_space)) if local_space else [()]
    for a in range(num_actions):
        for r, local in enumerate(locals_):
            rows[a, r] = row_of(local, a)
    return TransitionFactor(target, scope, shape, rows)


def _point_mass(n: int, value: int) -> np.ndarray:
    row = np.zeros(n)
    row[value] = 1.0
    return row


def _slipping(n: int, current: int, target: int, p_slip: float) -> np.ndarray:
    row = _point_mass(n, current) * p_slip
    row[target] += 1.0 - p_slip
    return row


def make_chain(m: int, n: int, p_slip: float, gamma: float = 0.9, r_max: float = 1.0) -> FmdpSpec:
    """
    a chain of counters. action 1 ("advance") increments variable 0 and every
    variable whose predecessor sits at its top value; action 0 ("reset")
    decrements every variable. a move fails with probability p_slip. reward
    r_max is paid while the last variable is at its top value.

    title: chain
    prepare:
    >>> from fmdpy.env.generators import make_chain
    >>> from fmdpy.core.model import validate_model, factored_size
    test:
    >>> chain = make_chain(3, 2, 0.1)
    >>> assert validate_model(chain) == []
    >>> assert factored_size(chain) == 4
    >>> assert [f.scope for f in chain.transitions] == [(0, ), (0, 1), (1, 2)]
    """
    if m < 1 or n < 2 or not 0.0 <= p_slip < 1.0:
        raise ConfigError(f'chain needs m >= 1, n >= 2, p_slip in [0, 1); got {m}, {n}, {p_slip}')
    space = VariableSpace.of((n, ) * m)
    top = n - 1

    def head(local, a):
        (x, ) = local
        return _slipping(n, x, min(x + 1, top) if a else max(x - 1, 0), p_slip)

    def link(local, a):
        previous, x = local
        if a:
            return _slipping(n, x, min(x + 1, top) if previous == top else x, p_slip)
        return _slipping(n, x, max(x - 1, 0), p_slip)

    transitions = [_factor(space, 0, (0, ), 2, head)]
    transitions.extend(_factor(space, i, (i - 1, i), 2, link) for i in range(1, m))
    table = np.zeros((2, n))
    table[:, top] = r_max
    return FmdpSpec(
        space=space,
        num_actions=2,
        transitions=tuple(transitions),
        rewards=(RewardFactor((m - 1, ), (n, ), table), ),
        gamma=gamma,
        start=(0, ) * m,
        scope_bound=2 if m > 1 else 1,
        r_max=r_max,
        variable_names=tuple(f'x{i}' for i in range(m)),
        action_names=('reset', 'advance'),
        reward_names=('goal', ),
    )


def make_sysadmin_ring(m: int, p_fail: float, p_fix: float, gamma: float = 0.9) -> FmdpSpec:
    """
    machines on a ring, 1 = working. machine i fails with probability p_fail,
    or 1 - (1 - p_fail)^2 when machine i-1 is down; failed machines stay down
    until rebooted. action j < m reboots machine j (success probability p_fix),
    action m is a no-op. each working machine pays reward 1.

    title: sysadmin ring
    prepare:
    >>> from fmdpy.env.generators import make_sysadmin_ring
    >>> from fmdpy.core.model import validate_model, transition_prob
    test:
    >>> ring = make_sysadmin_ring(3, 0.0, 0.9)
    >>> assert validate_model(ring) == []
    >>> assert ring.num_actions == 4
    >>> assert all(len(f.scope) <= 2 for f in ring.transitions)
    >>> assert transition_prob(ring, (1, 1, 1), 3, (1, 1, 1)) == 1.0
    """
    if m < 2 or not (0.0 <= p_fail <= 1.0 and 0.0 <= p_fix <= 1.0):
        raise ConfigError(f'sysadmin ring needs m >= 2 and probabilities in [0, 1]; got {m}, {p_fail}, {p_fix}')
    space = VariableSpace.of((2, ) * m)
    noop = m

    def machine(i):
        left = (i - 1) % m
        scope = tuple(sorted({left, i}))

        def row_of(local, a):
            status = dict(zip(scope, local))
            if a == i:
                return np.array([1.0 - p_fix, p_fix])
            if not status[i]:
                return _point_mass(2, 0)
            fail = p_fail if status[left] else 1.0 - (1.0 - p_fail)**2
            return np.array([fail, 1.0 - fail])

        return _factor(space, i, scope, m + 1, row_of)

    working = np.tile(np.array([0.0, 1.0]), (m + 1, 1))
    return FmdpSpec(
        space=space,
        num_actions=m + 1,
        transitions=tuple(machine(i) for i in range(m)),
        rewards=tuple(RewardFactor((i, ), (2, ), working.copy()) for i in range(m)),
        gamma=gamma,
        start=(1, ) * m,
        scope_bound=2,
        r_max=1.0,
        variable_names=tuple(f'machine{i}' for i in range(m)),
        action_names=tuple(f'reboot{j}' for j in range(m)) + ('noop', ),
        reward_names=tuple(f'up{i}' for i in range(m)),
    )


def make_random_fmdp(m: int,
                     n: t.Union[int, t.Sequence[int]],
                     m_f: int,
                     num_actions: int,
                     seed: int,
                     gamma: float = 0.9,
                     r_max: float = 1.0,
                     num_rewards: t.Optional[int] = None) -> FmdpSpec:
    """
    random scopes of size <= m_f (each transition scope contains its target),
    Dirichlet(1) rows and uniform rewards in [0, r_max].

    title: random fmdp
    prepare:
    >>> from fmdpy.env.generators import make_random_fmdp
    >>> from fmdpy.core.model import specs_equal
    test:
    >>> assert specs_equal(make_random_fmdp(3, 2, 2, 2, seed=5), make_random_fmdp(3, 2, 2, 2, seed=5))
    >>> assert not specs_equal(make_random_fmdp(3, 2, 2, 2, seed=5), make_random_fmdp(3, 2, 2, 2, seed=6))
    """
    sizes = (n, ) * m if isinstance(n, int) else tuple(n)
    if len(sizes) != m or not 1 <= m_f <= m or num_actions < 1:
        raise ConfigError(f'random fmdp needs len(sizes) == m and 1 <= m_f <= m; got {sizes}, {m}, {m_f}')
    space = VariableSpace.of(sizes)
    rng = np.random.default_rng(seed)

    transitions = []
    for i in range(m):
        k = int(rng.integers(1, m_f + 1))
        others = [j for j in range(m) if j != i]
        scope = tuple(sorted({i, *rng.choice(others, size=k - 1, replace=False).tolist()}))
        rows = rng.dirichlet(np.ones(sizes[i]), size=(num_actions, space.scope_size(scope)))
        transitions.append(TransitionFactor(i, scope, space.scope_sizes(scope), rows))

    rewards = []
    for _ in range(m if num_rewards is None else num_rewards):
        k = int(rng.integers(1, m_f + 1))
        scope = tuple(sorted(rng.choice(m, size=k, replace=False).tolist()))
        table = rng.uniform(0.0, r_max, size=(num_actions, space.scope_size(scope)))
        rewards.append(RewardFactor(scope, space.scope_sizes(scope), table))

    return FmdpSpec(
        space=space,
        num_actions=num_actions,
        transitions=tuple(transitions),
        rewards=tuple(rewards),
        gamma=gamma,
        start=(0, ) * m,
        scope_bound=m_f,
        r_max=r_max,
    )
