"""
the experiment runs behind the command line. every run reads an FMDP
document, writes its files into the output directory and returns an exit
code; errors are mapped to codes here, never raised to the caller.
"""
import logging
import time
import typing as t
from enum import IntEnum

import numpy as np
import pandas as pd
from Redy.Magic.Pattern import Pattern
from Redy.Tools.PathLib import Path

from fmdpy.approx.basis import (BasisSet, NormalizationScheme, full_projection, indicator_basis, joint_indicator_basis,
                                constant_basis, value_at)
from fmdpy.approx.fvi import PlannerConfig, sample_size, solve
from fmdpy.core.model import FmdpSpec
from fmdpy.env.generators import make_chain, make_random_fmdp, make_sysadmin_ring
from fmdpy.env.sim import Environment
from fmdpy.errors import (ConfigError, DegenerateBasisError, FmdpError, FmdpFormatError, InvalidStateError,
                          NonConvergenceError, OracleTooLargeError)
from fmdpy.format.document import FmdpDocument, check_fmdp, parse_fmdp
from fmdpy.format.emit import emit_fmdp
from fmdpy.harness.metrics import OracleReference, RunMetrics
from fmdpy.harness.outputs import output_dir, write_csv, write_json, write_text
from fmdpy.learn.agent import FoimAgent, FoimConfig
from fmdpy.learn.checkpoint import config_to_json, load_checkpoint, restore_agent, restore_rng, save_checkpoint
from fmdpy.oracle.flat import exact_avi_fixed_point, exact_vi, export_flat, flatten
from fmdpy.utils.rng import streams

logger = logging.getLogger(__name__)


class ExitCode(IntEnum):
    OK = 0
    USAGE = 1
    VALIDATION = 2
    NONCONVERGENCE = 3
    ORACLE_TOO_LARGE = 4


BASIS_KINDS = ('document', 'indicator', 'joint', 'constant')
GENERATOR_KINDS = ('chain', 'sysadmin', 'random')
ORACLE_TASKS = ('vi', 'avi', 'flatten')


def exit_code(e: BaseException) -> ExitCode:
    """
    title: exit codes
    prepare:
    >>> from fmdpy.harness.runs import exit_code, ExitCode
    >>> from fmdpy.errors import ConfigError, NonConvergenceError, OracleTooLargeError
    test:
    >>> assert exit_code(ConfigError('x')) is ExitCode.USAGE
    >>> assert exit_code(NonConvergenceError('x')) is ExitCode.NONCONVERGENCE
    >>> assert exit_code(OracleTooLargeError(10, 5)) is ExitCode.ORACLE_TOO_LARGE
    """
    if isinstance(e, (FmdpFormatError, InvalidStateError, DegenerateBasisError)):
        return ExitCode.VALIDATION
    if isinstance(e, NonConvergenceError):
        return ExitCode.NONCONVERGENCE
    if isinstance(e, OracleTooLargeError):
        return ExitCode.ORACLE_TOO_LARGE
    return ExitCode.USAGE


def _guarded(run: t.Callable[..., ExitCode]) -> t.Callable[..., ExitCode]:

    def call(*args, **kwargs) -> ExitCode:
        begin = time.perf_counter()
        try:
            return run(*args, **kwargs)
        except (FmdpError, OSError) as e:
            code = exit_code(e)
            if isinstance(e, FmdpFormatError):
                for issue in e.issues:
                    logger.error('%s', issue)
            else:
                logger.error('%s', e)
            return code
        finally:
            logger.info('%s finished in %.3fs', run.__name__, time.perf_counter() - begin)

    call.__name__ = run.__name__
    call.__doc__ = run.__doc__
    return call


def read_document(filename: str) -> FmdpDocument:
    with Path(filename).open('r') as f:
        text = f.read()
    return parse_fmdp(text, filename)


def override_gamma(model: FmdpSpec, gamma: t.Optional[float]) -> FmdpSpec:
    if gamma is None:
        return model
    if not 0.0 <= gamma < 1.0:
        raise ConfigError(f'gamma must be in [0, 1), got {gamma}')
    return model._replace(gamma=float(gamma))


@Pattern
def _basis_of(kind: str, doc: FmdpDocument):
    return kind


@_basis_of.case('document')
def _basis_of(kind: str, doc: FmdpDocument):
    return doc.basis if doc.basis is not None else indicator_basis(doc.model.space)


@_basis_of.case('indicator')
def _basis_of(kind: str, doc: FmdpDocument):
    return indicator_basis(doc.model.space)


@_basis_of.case('joint')
def _basis_of(kind: str, doc: FmdpDocument):
    return joint_indicator_basis(doc.model.space)


@_basis_of.case('constant')
def _basis_of(kind: str, doc: FmdpDocument):
    return constant_basis()


def choose_basis(doc: FmdpDocument, kind: str = 'document') -> BasisSet:
    """the document's own basis, or a generated one; 'document' falls back to indicators."""
    if kind not in BASIS_KINDS:
        raise ConfigError(f'unknown basis {kind!r}, expected one of {", ".join(BASIS_KINDS)}')
    return _basis_of(kind, doc)


def parse_scheme(name: str) -> NormalizationScheme:
    try:
        return NormalizationScheme(name)
    except ValueError:
        raise ConfigError(f'unknown normalization scheme {name!r}') from None


def weights_frame(model: FmdpSpec, basis: BasisSet, w: np.ndarray) -> pd.DataFrame:
    names = model.names().variable_names
    scopes = [' '.join(names[i] for i in h.scope) for h in basis.functions]
    return pd.DataFrame({'k': np.arange(basis.size), 'scope': scopes, 'weight': np.asarray(w, dtype=float)})


@_guarded
def run_validate(filename: str) -> ExitCode:
    """print every issue of a document; exit 0 iff there is none."""
    with Path(filename).open('r') as f:
        text = f.read()
    issues = check_fmdp(text, filename)
    for issue in issues:
        print(f'{filename}:{issue}')
    if issues:
        return ExitCode.VALIDATION
    print(f'{filename}: ok')
    return ExitCode.OK


class GeneratorOptions(t.NamedTuple):
    m: int = 3
    n: int = 2
    p: float = 0.1
    p_fix: float = 0.9
    m_f: int = 2
    actions: int = 2
    seed: int = 0
    gamma: float = 0.9


@Pattern
def generate(kind: str, options: GeneratorOptions) -> FmdpSpec:
    return kind


@generate.case('chain')
def generate(kind: str, options: GeneratorOptions) -> FmdpSpec:
    return make_chain(options.m, options.n, options.p, options.gamma)


@generate.case('sysadmin')
def generate(kind: str, options: GeneratorOptions) -> FmdpSpec:
    return make_sysadmin_ring(options.m, options.p, options.p_fix, options.gamma)


@generate.case('random')
def generate(kind: str, options: GeneratorOptions) -> FmdpSpec:
    return make_random_fmdp(options.m, options.n, options.m_f, options.actions, options.seed, options.gamma)


@_guarded
def run_gen(kind: str, options: GeneratorOptions = GeneratorOptions(), out: str = None,
            filename: str = None) -> ExitCode:
    """write a benchmark model, with its indicator basis, as a document."""
    if kind not in GENERATOR_KINDS:
        raise ConfigError(f'unknown generator {kind!r}, expected one of {", ".join(GENERATOR_KINDS)}')
    model = generate(kind, options)
    name = filename or f'{kind}.fmdp'
    write_text(output_dir(out), name, emit_fmdp(model, indicator_basis(model.space), name=kind))
    return ExitCode.OK


@_guarded
def run_plan(filename: str,
             config: PlannerConfig = PlannerConfig(),
             basis: str = 'document',
             seed: int = 0,
             gamma_override: float = None,
             out: str = None) -> ExitCode:
    """
    FVI on the document's model: weights.csv and report.json. the report is
    written even when the planner does not converge.
    """
    doc = read_document(filename)
    model = override_gamma(doc.model, gamma_override)
    basis_set = choose_basis(doc, basis)
    directory = output_dir(out)

    code = ExitCode.OK
    try:
        result = solve(model, basis_set, config, rng=streams(seed).planner)
    except NonConvergenceError as e:
        logger.error('%s', e)
        result = e.result
        code = ExitCode.NONCONVERGENCE
    if not result.converged:
        code = ExitCode.NONCONVERGENCE

    write_csv(directory, 'weights.csv', weights_frame(model, basis_set, result.weights))
    write_json(
        directory, 'report.json', {
            'iterations': result.iterations,
            'residual': result.residual,
            'n1': len(result.states),
            'n1_formula': sample_size(model.space, config._replace(exhaustive=False, n1=None)),
            'converged': result.converged,
            'basis_size': basis_set.size,
            'gamma': model.gamma,
            'epsilon': config.epsilon,
            'value_at_start': value_at(basis_set, result.weights, model.start),
        })
    return code


@Pattern
def _oracle_task(task: str, doc: FmdpDocument, model: FmdpSpec, basis: str, scheme: NormalizationScheme, tol: float,
                 directory: Path):
    return task


@_oracle_task.case('vi')
def _oracle_task(task, doc, model, basis, scheme, tol, directory):
    flat = flatten(model)
    v = exact_vi(flat, tol)
    write_csv(directory, 'values.csv', pd.DataFrame({'state': np.arange(flat.num_states), 'value': v}))


@_oracle_task.case('avi')
def _oracle_task(task, doc, model, basis, scheme, tol, directory):
    flat = flatten(model)
    basis_set = choose_basis(doc, basis)
    proj = full_projection(basis_set, model.space, scheme)
    w = exact_avi_fixed_point(flat, proj.features, proj.projection, tol)
    write_csv(directory, 'weights.csv', weights_frame(model, basis_set, w))


@_oracle_task.case('flatten')
def _oracle_task(task, doc, model, basis, scheme, tol, directory):
    write_text(directory, 'flat.txt', export_flat(flatten(model)))


@_guarded
def run_oracle(filename: str,
               task: str,
               basis: str = 'document',
               scheme: str = 'global',
               tol: float = 1e-10,
               gamma_override: float = None,
               out: str = None) -> ExitCode:
    """exact references on the flattened model: vi -> values.csv, avi -> weights.csv, flatten -> flat.txt."""
    if task not in ORACLE_TASKS:
        raise ConfigError(f'unknown oracle task {task!r}, expected one of {", ".join(ORACLE_TASKS)}')
    doc = read_document(filename)
    model = override_gamma(doc.model, gamma_override)
    _oracle_task(task, doc, model, basis, parse_scheme(scheme), tol, output_dir(out))
    return ExitCode.OK


@_guarded
def run_learn(filename: str,
              config: FoimConfig = FoimConfig(),
              steps: int = 1000,
              basis: str = 'document',
              oracle_metrics: bool = False,
              gamma_override: float = None,
              checkpoint: str = None,
              resume: str = None,
              out: str = None) -> ExitCode:
    """
    run the learner against the document's model for `steps` steps:
    metrics.csv and summary.json. a resumed run continues the agent, the
    environment and the random streams of the checkpoint and records only
    the steps it takes itself.
    """
    if steps < 0:
        raise ConfigError(f'steps must be >= 0, got {steps}')
    doc = read_document(filename)
    base = override_gamma(doc.model, gamma_override)
    rngs = streams(config.seed)
    agent = FoimAgent(base, choose_basis(doc, basis), config, rng=rngs.planner)
    named_rngs = rngs._asdict()

    env_state = None
    if resume:
        saved = load_checkpoint(resume)
        if config_to_json(saved.config) != config_to_json(agent.config):
            raise ConfigError(f'checkpoint {resume} was written with a different configuration')
        restore_agent(agent, saved)
        for name, state in saved.rng_states.items():
            restore_rng(named_rngs[name], state)
        env_state = saved.env_state
        logger.info('resumed at step %d from %s', agent.t, resume)
    env = Environment(base, rngs.env, env_state)

    oracle = None
    if oracle_metrics:
        try:
            oracle = OracleReference.of(agent)
        except OracleTooLargeError as e:
            logger.error('%s; run again without --oracle_metrics', e)
            return ExitCode.ORACLE_TOO_LARGE
    metrics = RunMetrics(config.epsilon, oracle)

    code = ExitCode.OK
    logger.info('learning for %d steps', steps)
    try:
        for _ in range(steps):
            metrics.record(agent, agent.step(env))
    except NonConvergenceError as e:
        logger.error('%s', e)
        code = ExitCode.NONCONVERGENCE

    directory = output_dir(out)
    if checkpoint:
        save_checkpoint(checkpoint, agent, named_rngs, env.state)
        logger.info('checkpoint at step %d written to %s', agent.t, checkpoint)
    write_csv(directory, 'metrics.csv', metrics.frame())
    constants = agent.constants
    write_json(
        directory, 'summary.json', {
            'steps': len(metrics.rows),
            't': agent.t,
            'plans': agent.plans,
            'r_e': constants.r_e,
            'known_threshold': constants.known_threshold,
            'v0': constants.v0,
            'epsilon_horizon': constants.horizon,
            'mistake_bound': constants.mistake_bound,
            'n_f': constants.n_f,
            'known_fraction': agent.known_fraction(),
            'first_all_known': metrics.first_all_known,
            'mistakes': metrics.mistakes if oracle is not None else None,
            'completed': code is ExitCode.OK,
        })
    return code
