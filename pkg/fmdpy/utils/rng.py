from typing import NamedTuple

import numpy as np


class RngStreams(NamedTuple):
    env: np.random.Generator
    agent: np.random.Generator
    planner: np.random.Generator


def streams(seed: int) -> RngStreams:
    """
    independent generators for the environment, the agent and the planner.

    title: rng streams
    prepare:
    >>> from fmdpy.utils.rng import streams
    test:
    >>> a, b = streams(7), streams(7)
    >>> assert a.env.integers(1 << 30) == b.env.integers(1 << 30)
    >>> assert a.planner.random() == b.planner.random()
    """
    env, agent, planner = np.random.SeedSequence(seed).spawn(3)
    return RngStreams(
        env=np.random.default_rng(env),
        agent=np.random.default_rng(agent),
        planner=np.random.default_rng(planner),
    )
