"""
exceptions raised by fmdpy.

structural model checks (`fmdpy.core.model.validate_model`) return violation
records instead of raising; everything else signals through this hierarchy.
"""
import typing as t


class FmdpError(Exception):
    pass


class InvalidSpaceError(FmdpError, ValueError):
    pass


class InvalidStateError(FmdpError, ValueError):

    def __init__(self, state, msg: str):
        super().__init__(f'invalid state {tuple(state)!r}: {msg}')
        self.state = tuple(state)


class ContractError(FmdpError):
    pass


class DegenerateBasisError(FmdpError):
    pass


class ConfigError(FmdpError, ValueError):
    pass


class FormulaDomainError(FmdpError, ArithmeticError):
    pass


class NonConvergenceError(FmdpError):

    def __init__(self, msg: str, result=None):
        super().__init__(msg)
        self.result = result


class OracleTooLargeError(FmdpError):

    def __init__(self, num_states: int, limit: int):
        super().__init__(f'flat oracle needs {num_states} states, limit is {limit}')
        self.num_states = num_states
        self.limit = limit


class FmdpFormatError(FmdpError):

    def __init__(self, issues: t.List['Issue']):
        self.issues = list(issues)
        head = self.issues[0] if self.issues else None
        msg = f'{len(self.issues)} issue(s)' + (f', first: {head}' if head else '')
        super().__init__(msg)
