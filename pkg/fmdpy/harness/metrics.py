"""
per-step learning metrics and the oracle reference they are measured against.

the reference Q is the AVI fixed point of the true model lifted to the
garden-of-Eden space, using the agent's own augmented basis.
"""
import logging
import typing as t
from typing import NamedTuple

import numpy as np
import pandas as pd

from fmdpy.approx.basis import full_projection
from fmdpy.core.space import all_states, state_index
from fmdpy.learn.agent import FoimAgent, StepRecord
from fmdpy.learn.goe import lift_true_model
from fmdpy.oracle.flat import FlatMdp, exact_avi_fixed_point, flatten, l1_model_distance, q_table

logger = logging.getLogger(__name__)

BASE_COLUMNS = ('t', 'state', 'action', 'q_foim', 'known_fraction', 'planner_iterations')
ORACLE_COLUMNS = ('t', 'state', 'action', 'q_foim', 'q_ref', 'near_optimal', 'known_fraction', 'model_error',
                  'planner_iterations')


class OracleReference(NamedTuple):
    truth: FlatMdp
    # (A, N) over the augmented space
    q: np.ndarray
    weights: np.ndarray
    # augmented flat indices of the states without a garden-of-Eden component
    real: np.ndarray

    @classmethod
    def of(cls, agent: FoimAgent, tol: t.Optional[float] = None) -> 'OracleReference':
        lifted = lift_true_model(agent.goe)
        if tol is None:
            # relative to the value scale; R_E makes values large
            tol = 1e-12 * max(1.0, len(lifted.rewards) * lifted.r_max / (1 - lifted.gamma))
        truth = flatten(lifted)
        proj = full_projection(agent.basis, lifted.space, agent.config.planner.scheme)
        w = exact_avi_fixed_point(truth, proj.features, proj.projection, tol)
        logger.info('oracle reference over %d states', truth.num_states)
        base = agent.goe.base.space
        real = np.array([state_index(x, lifted.space) for x in all_states(base)])
        return cls(truth, q_table(truth, proj.features @ w), w, real)

    def model_error(self, agent: FoimAgent) -> float:
        """largest L1 distance between the agent's rows and the truth, over real states."""
        distance = l1_model_distance(flatten(agent.model), self.truth)
        return float(distance[self.real].max())


class RunMetrics:

    def __init__(self, epsilon: float, oracle: t.Optional[OracleReference] = None):
        self.epsilon = epsilon
        self.oracle = oracle
        self.rows: t.List[tuple] = []
        self.mistakes = 0
        self.first_all_known: t.Optional[int] = None

    @property
    def columns(self) -> t.Tuple[str, ...]:
        return ORACLE_COLUMNS if self.oracle else BASE_COLUMNS

    def record(self, agent: FoimAgent, step: StepRecord):
        base_space = agent.goe.base.space
        state = state_index(step.state, base_space)
        if step.known_fraction >= 1.0 and self.first_all_known is None:
            self.first_all_known = step.t
        if self.oracle is None:
            self.rows.append((step.t, state, step.action, step.q, step.known_fraction, step.planner_iterations))
            return
        q_ref = float(self.oracle.q[step.action, state_index(step.state, agent.goe.space)])
        near_optimal = step.q >= q_ref - self.epsilon
        if not near_optimal:
            self.mistakes += 1
        self.rows.append((step.t, state, step.action, step.q, q_ref, int(near_optimal), step.known_fraction,
                          self.oracle.model_error(agent), step.planner_iterations))

    def frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.rows, columns=list(self.columns))
        if not self.rows:
            return frame
        return frame.astype({'t': 'int64', 'state': 'int64', 'action': 'int64', 'planner_iterations': 'int64'})
