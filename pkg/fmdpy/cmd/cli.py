import logging

from wisepy.talking import Talking

from fmdpy.approx.fvi import PlannerConfig
from fmdpy.harness.runs import (ExitCode, GeneratorOptions, parse_scheme, run_gen, run_learn, run_oracle, run_plan,
                                run_validate)
from fmdpy.learn.agent import FoimConfig

fmdpy = Talking()


def _logging(verbose):
    logging.basicConfig(
        level=logging.DEBUG if _flag(verbose) else logging.INFO, format='%(asctime)s %(name)s %(levelname)s %(message)s')


def _flag(value) -> bool:
    # wisepy hands flags over either as booleans or as their text
    if isinstance(value, str):
        return value.lower() not in ('', '0', 'false', 'no', 'off')
    return bool(value)


def _opt(convert, value):
    return None if value is None else convert(value)


def _exit(code: ExitCode):
    raise SystemExit(int(code))


@fmdpy
def validate(filename: str, verbose: bool = False):
    """
    filename:  FMDP document to check
    """
    _logging(verbose)
    _exit(run_validate(filename))


@fmdpy
def gen(kind: str,
        m: int = 3,
        n: int = 2,
        p: float = 0.1,
        p_fix: float = 0.9,
        m_f: int = 2,
        actions: int = 2,
        seed: int = 0,
        gamma: float = 0.9,
        name: str = None,
        out: str = None,
        verbose: bool = False):
    """
    kind    :  chain | sysadmin | random
    p       :  slip probability (chain) or failure probability (sysadmin)
    p_fix   :  reboot success probability (sysadmin)
    m_f     :  scope bound (random)
    name    :  output file name, <kind>.fmdp by default
    """
    _logging(verbose)
    options = GeneratorOptions(int(m), int(n), float(p), float(p_fix), int(m_f), int(actions), int(seed), float(gamma))
    _exit(run_gen(kind, options, out, name))


def _planner(epsilon, delta, n1, exhaustive, max_iters, scheme) -> PlannerConfig:
    return PlannerConfig(
        epsilon=float(epsilon),
        delta=float(delta),
        n1=_opt(int, n1),
        exhaustive=_flag(exhaustive),
        max_iters=int(max_iters),
        scheme=parse_scheme(scheme))


@fmdpy
def plan(filename: str,
         epsilon: float = 0.1,
         delta: float = 0.1,
         n1: int = None,
         exhaustive: bool = False,
         max_iters: int = 10000,
         scheme: str = 'global',
         basis: str = 'document',
         seed: int = 0,
         gamma_override: float = None,
         out: str = None,
         verbose: bool = False):
    """
    filename   :  FMDP document
    basis      :  document | indicator | joint | constant
    scheme     :  global | literal normalization of the projection
    exhaustive :  plan on every joint state instead of a sample
    """
    _logging(verbose)
    try:
        config = _planner(epsilon, delta, n1, exhaustive, max_iters, scheme)
    except ValueError as e:
        logging.getLogger(__name__).error('%s', e)
        _exit(ExitCode.USAGE)
    _exit(run_plan(filename, config, basis, int(seed), _opt(float, gamma_override), out))


@fmdpy
def learn(filename: str,
          steps: int = 1000,
          epsilon: float = 0.1,
          delta: float = 0.1,
          c_re: float = 1.0,
          r_e: float = None,
          c_kb: float = 1.0,
          replan_every: int = 1,
          warm_start: bool = True,
          n1: int = None,
          exhaustive: bool = False,
          max_iters: int = 10000,
          scheme: str = 'global',
          basis: str = 'document',
          seed: int = 0,
          oracle_metrics: bool = False,
          gamma_override: float = None,
          checkpoint: str = None,
          resume: str = None,
          out: str = None,
          verbose: bool = False):
    """
    filename       :  FMDP document of the environment
    c_re           :  multiplier of the R_E formula
    r_e            :  explicit R_E, overrides the formula
    c_kb           :  multiplier of the known-threshold formula
    oracle_metrics :  add Q reference, near-optimality and model error columns
    checkpoint     :  write a checkpoint here when the run ends
    resume         :  continue from this checkpoint
    """
    _logging(verbose)
    try:
        config = FoimConfig(
            epsilon=float(epsilon),
            delta=float(delta),
            c=float(c_re),
            r_e=_opt(float, r_e),
            replan_every=int(replan_every),
            warm_start=_flag(warm_start),
            planner=_planner(epsilon, delta, n1, exhaustive, max_iters, scheme),
            c_kb=float(c_kb),
            seed=int(seed))
    except ValueError as e:
        logging.getLogger(__name__).error('%s', e)
        _exit(ExitCode.USAGE)
    _exit(
        run_learn(filename, config, int(steps), basis, _flag(oracle_metrics), _opt(float, gamma_override), checkpoint,
                  resume, out))


@fmdpy
def oracle(task: str,
           filename: str,
           basis: str = 'document',
           scheme: str = 'global',
           tol: float = 1e-10,
           gamma_override: float = None,
           out: str = None,
           verbose: bool = False):
    """
    task     :  vi | avi | flatten
    filename :  FMDP document
    """
    _logging(verbose)
    _exit(run_oracle(filename, task, basis, scheme, float(tol), _opt(float, gamma_override), out))


def fmdpy_cli():
    fmdpy.on()
