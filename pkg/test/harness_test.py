import json
import os

import numpy as np
import pandas as pd
import pytest

from fmdpy.approx.fvi import PlannerConfig
from fmdpy.harness.outputs import OUT_ENV, format_csv
from fmdpy.harness.runs import (ExitCode, GeneratorOptions, run_gen, run_learn, run_oracle, run_plan, run_validate)
from fmdpy.learn.agent import FoimConfig

EXACT = PlannerConfig(epsilon=1e-9, exhaustive=True)
LEARN = FoimConfig(epsilon=0.2, r_e=30.0, c_kb=0.01, planner=PlannerConfig(exhaustive=True))


def read_bytes(directory, name):
    with open(os.path.join(str(directory), name), 'rb') as f:
        return f.read()


def read_json(directory, name):
    return json.loads(read_bytes(directory, name))


@pytest.fixture
def chain_document(tmp_path):
    assert run_gen('chain', GeneratorOptions(m=2, n=2, p=0.1), out=str(tmp_path)) is ExitCode.OK
    return str(tmp_path / 'chain.fmdp')


def test_single_state_value(single_state_document, tmp_path):
    assert run_plan(single_state_document, EXACT, out=str(tmp_path)) is ExitCode.OK
    report = read_json(tmp_path, 'report.json')
    assert report['converged'] is True
    assert abs(report['value_at_start'] - 2.0) <= 1e-6
    assert report['n1'] == 1


def test_gamma_override(single_state_document, tmp_path):
    assert run_plan(single_state_document, EXACT, gamma_override=0.0, out=str(tmp_path)) is ExitCode.OK
    assert abs(read_json(tmp_path, 'report.json')['value_at_start'] - 1.0) <= 1e-9
    assert run_plan(single_state_document, EXACT, gamma_override=1.0, out=str(tmp_path)) is ExitCode.USAGE


def test_oracle_vi_single_state(single_state_document, tmp_path):
    assert run_oracle(single_state_document, 'vi', out=str(tmp_path)) is ExitCode.OK
    values = pd.read_csv(str(tmp_path / 'values.csv'))
    assert list(values.columns) == ['state', 'value']
    assert values['value'].tolist() == pytest.approx([2.0], abs=1e-8)


def test_joint_basis_plan_matches_value_iteration(swap_document, tmp_path):
    plan_dir, oracle_dir = tmp_path / 'plan', tmp_path / 'oracle'
    assert run_plan(swap_document, EXACT, basis='joint', out=str(plan_dir)) is ExitCode.OK
    assert run_oracle(swap_document, 'vi', out=str(oracle_dir)) is ExitCode.OK
    weights = pd.read_csv(str(plan_dir / 'weights.csv'))
    values = pd.read_csv(str(oracle_dir / 'values.csv'))
    assert list(weights.columns) == ['k', 'scope', 'weight']
    assert np.max(np.abs(weights['weight'].values - values['value'].values)) <= 1e-6


def test_oracle_avi_with_joint_indicators_is_vi(swap_document, tmp_path):
    assert run_oracle(swap_document, 'avi', basis='joint', out=str(tmp_path / 'avi')) is ExitCode.OK
    assert run_oracle(swap_document, 'vi', out=str(tmp_path / 'vi')) is ExitCode.OK
    weights = pd.read_csv(str(tmp_path / 'avi' / 'weights.csv'))['weight'].values
    values = pd.read_csv(str(tmp_path / 'vi' / 'values.csv'))['value'].values
    assert np.max(np.abs(weights - values)) <= 1e-8


def test_oracle_flatten_writes_a_permutation(swap_document, tmp_path):
    assert run_oracle(swap_document, 'flatten', out=str(tmp_path)) is ExitCode.OK
    lines = read_bytes(tmp_path, 'flat.txt').decode().splitlines()
    assert lines[:3] == ['states 4', 'actions 1', 'gamma 0.9']
    matrix = lines[lines.index('transition') + 1:]
    assert matrix == ['1 0 0 0', '0 0 1 0', '0 1 0 0', '0 0 0 1']


def test_unknown_oracle_task(swap_document, tmp_path):
    assert run_oracle(swap_document, 'policy', out=str(tmp_path)) is ExitCode.USAGE


def test_plan_is_byte_identical_across_runs(chain_document, tmp_path):
    config = PlannerConfig(n1=6)
    for name in ('first', 'second'):
        assert run_plan(chain_document, config, basis='indicator', seed=3, out=str(tmp_path / name)) is ExitCode.OK
    for name in ('weights.csv', 'report.json'):
        assert read_bytes(tmp_path / 'first', name) == read_bytes(tmp_path / 'second', name)


def test_plan_reports_nonconvergence(chain_document, tmp_path):
    config = PlannerConfig(exhaustive=True, max_iters=1)
    assert run_plan(chain_document, config, out=str(tmp_path)) is ExitCode.NONCONVERGENCE
    assert read_json(tmp_path, 'report.json')['converged'] is False


def test_validate_exit_codes(swap_document, tmp_path):
    assert run_validate(swap_document) is ExitCode.OK
    broken = tmp_path / 'broken.fmdp'
    broken.write_text('fmdp broken { gamma = 0.9; variables { x: 2; } actions { go; } }')
    assert run_validate(str(broken)) is ExitCode.VALIDATION
    assert run_validate(str(tmp_path / 'missing.fmdp')) is ExitCode.USAGE


def test_gen_round_trips_through_validate(tmp_path):
    for kind in ('chain', 'sysadmin', 'random'):
        assert run_gen(kind, out=str(tmp_path)) is ExitCode.OK
        assert run_validate(str(tmp_path / f'{kind}.fmdp')) is ExitCode.OK
    assert run_gen('maze', out=str(tmp_path)) is ExitCode.USAGE


def test_learn_with_no_steps_writes_headers(chain_document, tmp_path):
    assert run_learn(chain_document, LEARN, steps=0, out=str(tmp_path / 'plain')) is ExitCode.OK
    assert read_bytes(tmp_path / 'plain', 'metrics.csv') == \
        b't,state,action,q_foim,known_fraction,planner_iterations\n'
    assert run_learn(chain_document, LEARN, steps=0, oracle_metrics=True, out=str(tmp_path / 'oracle')) is ExitCode.OK
    assert read_bytes(tmp_path / 'oracle', 'metrics.csv') == \
        b't,state,action,q_foim,q_ref,near_optimal,known_fraction,model_error,planner_iterations\n'


def test_learn_is_byte_identical_across_runs(chain_document, tmp_path):
    for name in ('first', 'second'):
        code = run_learn(chain_document, LEARN, steps=40, oracle_metrics=True, out=str(tmp_path / name))
        assert code is ExitCode.OK
    for name in ('metrics.csv', 'summary.json'):
        assert read_bytes(tmp_path / 'first', name) == read_bytes(tmp_path / 'second', name)
    summary = read_json(tmp_path / 'first', 'summary.json')
    metrics = pd.read_csv(str(tmp_path / 'first' / 'metrics.csv'))
    assert summary['steps'] == 40 == len(metrics)
    assert summary['mistakes'] == int((metrics['near_optimal'] == 0).sum())
    assert summary['r_e'] == 30.0


def test_learn_resumes_from_a_checkpoint(chain_document, tmp_path):
    checkpoint = str(tmp_path / 'agent.npz')
    assert run_learn(chain_document, LEARN, steps=30, out=str(tmp_path / 'whole')) is ExitCode.OK
    assert run_learn(chain_document, LEARN, steps=20, checkpoint=checkpoint, out=str(tmp_path / 'head')) is ExitCode.OK
    assert run_learn(chain_document, LEARN, steps=10, resume=checkpoint, out=str(tmp_path / 'tail')) is ExitCode.OK

    whole = pd.read_csv(str(tmp_path / 'whole' / 'metrics.csv'))
    tail = pd.read_csv(str(tmp_path / 'tail' / 'metrics.csv'))
    assert format_csv(whole.iloc[20:].reset_index(drop=True)) == format_csv(tail)
    assert read_json(tmp_path / 'tail', 'summary.json')['t'] == 30

    other = LEARN._replace(c_kb=0.5)
    assert run_learn(chain_document, other, steps=1, resume=checkpoint, out=str(tmp_path / 'bad')) is ExitCode.USAGE


def test_learn_refuses_oracle_metrics_on_large_models(tmp_path):
    assert run_gen('chain', GeneratorOptions(m=13, n=2), out=str(tmp_path)) is ExitCode.OK
    code = run_learn(str(tmp_path / 'chain.fmdp'), LEARN, steps=1, oracle_metrics=True, out=str(tmp_path))
    assert code is ExitCode.ORACLE_TOO_LARGE


def test_output_directory_from_the_environment(single_state_document, tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / 'env-out'))
    assert run_oracle(single_state_document, 'vi') is ExitCode.OK
    assert (tmp_path / 'env-out' / 'values.csv').exists()
