"""
versioned agent checkpoints in numpy's .npz container.

    version       1
    config        FoimConfig as JSON
    t, plans      step counter and number of plans so far
    weights       latest weights (empty before the first plan)
    tc_<i>, vc_<i> per-factor counts
    rng           bit generator states as JSON, by stream name
    env_state     the environment state to resume from
"""
import json
import typing as t
from typing import NamedTuple

import numpy as np

from fmdpy.approx.basis import NormalizationScheme
from fmdpy.approx.fvi import PlannerConfig
from fmdpy.errors import ConfigError
from fmdpy.learn.agent import FoimAgent, FoimConfig

CHECKPOINT_VERSION = 1


class Checkpoint(NamedTuple):
    config: FoimConfig
    t: int
    plans: int
    weights: t.Optional[np.ndarray]
    transition_counts: t.Tuple[np.ndarray, ...]
    visit_counts: t.Tuple[np.ndarray, ...]
    rng_states: t.Dict[str, dict]
    env_state: t.Tuple[int, ...]


def config_to_json(config: FoimConfig) -> str:
    planner = config.planner._asdict()
    planner['scheme'] = config.planner.scheme.value
    fields = config._asdict()
    fields['planner'] = planner
    return json.dumps(fields, sort_keys=True)


def config_from_json(text: str) -> FoimConfig:
    fields = json.loads(text)
    planner = fields.pop('planner')
    planner['scheme'] = NormalizationScheme(planner['scheme'])
    return FoimConfig(planner=PlannerConfig(**planner), **fields)


def save_checkpoint(path, agent: FoimAgent, rngs: t.Mapping[str, np.random.Generator],
                    env_state: t.Sequence[int]):
    arrays = {
        'version': np.array(CHECKPOINT_VERSION),
        'config': np.array(config_to_json(agent.config)),
        't': np.array(agent.t),
        'plans': np.array(agent.plans),
        'weights': np.array([]) if agent.weights is None else agent.weights,
        'rng': np.array(json.dumps({name: rng.bit_generator.state for name, rng in rngs.items()})),
        'env_state': np.array(env_state, dtype=np.int64),
    }
    for i, (tc, vc) in enumerate(zip(agent.counts.transition_counts, agent.counts.visit_counts)):
        arrays[f'tc_{i}'] = tc
        arrays[f'vc_{i}'] = vc
    with open(path, 'wb') as f:
        np.savez(f, **arrays)


def load_checkpoint(path) -> Checkpoint:
    with np.load(path, allow_pickle=False) as data:
        version = int(data['version'])
        if version != CHECKPOINT_VERSION:
            raise ConfigError(f'checkpoint version {version} is not supported')
        count = sum(1 for name in data.files if name.startswith('tc_'))
        weights = data['weights']
        return Checkpoint(
            config=config_from_json(str(data['config'])),
            t=int(data['t']),
            plans=int(data['plans']),
            weights=weights.copy() if weights.size else None,
            transition_counts=tuple(data[f'tc_{i}'].copy() for i in range(count)),
            visit_counts=tuple(data[f'vc_{i}'].copy() for i in range(count)),
            rng_states=json.loads(str(data['rng'])),
            env_state=tuple(int(v) for v in data['env_state']),
        )


def restore_agent(agent: FoimAgent, checkpoint: Checkpoint):
    if len(checkpoint.transition_counts) != len(agent.counts.transition_counts):
        raise ConfigError('checkpoint was written for a different model')
    for old, new in zip(agent.counts.transition_counts, checkpoint.transition_counts):
        if old.shape != new.shape:
            raise ConfigError('checkpoint was written for a different model')
    counts = agent.counts._replace(transition_counts=checkpoint.transition_counts,
                                   visit_counts=checkpoint.visit_counts)
    agent.restore(counts, checkpoint.weights, checkpoint.t, checkpoint.plans)


def restore_rng(rng: np.random.Generator, state: dict):
    rng.bit_generator.state = state
