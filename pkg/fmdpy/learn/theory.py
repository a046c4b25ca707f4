"""
closed-form constants of the learning guarantee. every log is natural; hidden
constants are parameters defaulting to 1.
"""
import math

from fmdpy.errors import ConfigError, FormulaDomainError


def _log(argument: float, formula: str) -> float:
    if not argument > 1:
        raise FormulaDomainError(f'{formula}: log argument {argument:.6g} <= 1')
    return math.log(argument)


def _discount(gamma: float) -> float:
    if not 0 <= gamma < 1:
        raise ConfigError(f'gamma must be in [0, 1), got {gamma}')
    return 1 - gamma


def r_e(epsilon: float, delta: float, m: int, n_f: int, num_actions: int, r_max: float, gamma: float,
        c: float = 1.0) -> float:
    """
    the garden-of-Eden reward
        c m R^2 / ((1 - gamma)^4 eps) ln(m N_f |A| / ((1 - gamma) eps delta))

    title: garden of Eden reward
    prepare:
    >>> import math
    >>> from fmdpy.learn.theory import r_e
    test:
    >>> value = r_e(0.1, 0.1, 2, 4, 2, 1.0, 0.9)
    >>> assert abs(value - 200000 * math.log(16000)) < 1e-6
    >>> assert abs(value - 1936068.80) < 0.01
    >>> assert r_e(0.1, 0.1, 2, 4, 2, 1.0, 0.9, c=2.0) == 2 * value
    """
    g = _discount(gamma)
    log = _log(m * n_f * num_actions / (g * epsilon * delta), 'R_E')
    return c * m * r_max**2 / (g**4 * epsilon) * log


def beta(delta1: float, n: int) -> float:
    """
    title: concentration radius
    prepare:
    >>> from fmdpy.learn.theory import beta
    test:
    >>> assert abs(beta(0.1, 2) - 2.7162) < 1e-4
    >>> assert beta(1 - 1e-12, 0) < 1e-5
    """
    if not 0 < delta1 < 1:
        raise ConfigError(f'delta1 must be in (0, 1), got {delta1}')
    return math.sqrt(2 * (math.log(1 / delta1) + n * math.log(2)))


def accuracy_radius(k: int, delta1: float, n: int) -> float:
    """beta(delta1) / sqrt(k): L1 accuracy of a component row after k real visits."""
    if k < 1:
        return math.inf
    return beta(delta1, n) / math.sqrt(k)


def known_threshold(epsilon: float, delta: float, m: int, n_f: int, num_actions: int, c_kb: float = 1.0) -> int:
    """
    real visits after which a component counts as known,
        ceil(C m^2 / eps^2 ln(m^2 N_f |A| / (delta eps)))

    title: known threshold
    prepare:
    >>> from fmdpy.learn.theory import known_threshold
    test:
    >>> assert known_threshold(0.5, 0.1, 2, 4, 2) == 104
    """
    log = _log(m * m * n_f * num_actions / (delta * epsilon), 'KB')
    return math.ceil(c_kb * m * m / epsilon**2 * log)


def v0_bound(r_max: float, gamma: float) -> float:
    """
    title: value bound
    prepare:
    >>> from fmdpy.learn.theory import v0_bound
    test:
    >>> assert abs(v0_bound(1.0, 0.9) - 210.0) < 1e-9
    >>> assert v0_bound(2.0, 0.0) == 6.0
    """
    g = _discount(gamma)
    return (3 - gamma) / g * r_max / g


def epsilon_horizon(epsilon: float, gamma: float, r_e_value: float) -> float:
    """
    title: epsilon horizon
    prepare:
    >>> import math
    >>> from fmdpy.learn.theory import epsilon_horizon
    test:
    >>> assert abs(epsilon_horizon(0.1, 0.9, 1.0) - 10 * math.log(100)) < 1e-9
    """
    g = _discount(gamma)
    return r_e_value / g * _log(1 / (epsilon * g), 'horizon')


def k0(epsilon: float, delta: float, m: int, n_f: int, num_actions: int, gamma: float, c: float = 1.0) -> float:
    """visits after which the empirical rows are accurate to eps (1 - gamma) / m."""
    g = _discount(gamma)
    log = _log(m * m * n_f * num_actions / (g * delta * epsilon), 'k0')
    return c * m * m / (g * g * epsilon**2) * log


def delta_prime(epsilon: float, delta: float, m: int, n_f: int, num_actions: int, gamma: float,
                c: float = 1.0) -> float:
    """per-component failure probability matching `k0`."""
    g = _discount(gamma)
    log = _log(m * m * n_f * num_actions / (g * delta * epsilon), 'delta prime')
    return c * delta * epsilon**2 * g * g / (m**3 * n_f * num_actions) / log


def mistake_bound(epsilon: float, delta: float, m: int, n_f: int, num_actions: int, r_max: float, gamma: float,
                  c: float = 1.0) -> float:
    """
    the polynomial bound on non-near-optimal steps,
        c R^2 m^4 N_f |A| / (eps^4 (1 - gamma)^4) ln^3(1 / delta) ln^2(m N_f |A| / eps)
    a diagnostic; the constant is not known.
    """
    g = _discount(gamma)
    log_delta = _log(1 / delta, 'mistake bound')
    log_size = _log(m * n_f * num_actions / epsilon, 'mistake bound')
    return c * r_max**2 * m**4 * n_f * num_actions / (epsilon**4 * g**4) * log_delta**3 * log_size**2
