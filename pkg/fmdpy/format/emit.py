import io
import typing as t

from fmdpy.approx.basis import BasisSet
from fmdpy.core.model import FmdpSpec
from fmdpy.core.space import VariableSpace, all_states
from fmdpy.format.parser import KEYWORDS


def _number(value) -> str:
    # repr is the shortest text that reads back to the same float
    return repr(float(value))


def _names(names: t.Sequence[str], prefix: str) -> t.List[str]:
    out = []
    for k, name in enumerate(names):
        if not name.isidentifier() or name in KEYWORDS or name in out:
            name = f'{prefix}{k}'
        out.append(name)
    return out


def _keys(shape: t.Sequence[int]) -> t.List[str]:
    if not shape:
        return ['()']
    return ['(' + ', '.join(str(v) for v in local) + ')' for local in all_states(VariableSpace.of(shape))]


def emit_fmdp(model: FmdpSpec, basis: t.Optional[BasisSet] = None, name: str = 'model') -> str:
    """
    the canonical document of a model; parsing it gives back an equal model.

    title: emit and parse back
    prepare:
    >>> from fmdpy.env.generators import make_random_fmdp
    >>> from fmdpy.core.model import specs_equal
    >>> from fmdpy.format.emit import emit_fmdp
    >>> from fmdpy.format.document import parse_fmdp
    test:
    >>> model = make_random_fmdp(3, (2, 3, 2), 2, 2, seed=8)
    >>> assert specs_equal(parse_fmdp(emit_fmdp(model)).model, model)
    """
    model = model.names()
    variables = _names(model.variable_names, 'x')
    actions = _names(model.action_names, 'a')
    out = io.StringIO()
    write = out.write

    write(f'fmdp {name} {{\n')
    write(f'    gamma = {_number(model.gamma)};\n')
    write(f'    rmax = {_number(model.r_max)};\n')
    write(f'    scope_bound = {model.scope_bound};\n\n')

    write('    variables {\n')
    for var, n in zip(variables, model.space.sizes):
        write(f'        {var}: {n};\n')
    write('    }\n    actions {\n')
    for action in actions:
        write(f'        {action};\n')
    write('    }\n    start {\n')
    for var, v in zip(variables, model.start):
        write(f'        {var}: {v};\n')
    write('    }\n')

    def given(scope):
        return '(' + ', '.join(variables[i] for i in scope) + ')'

    for f in model.transitions:
        write(f'\n    transition {variables[f.target]} given {given(f.scope)} {{\n')
        for a, action in enumerate(actions):
            for r, key in enumerate(_keys(f.shape)):
                probs = ', '.join(_number(p) for p in f.rows[a, r])
                write(f'        {action} {key}: [{probs}];\n')
        write('    }\n')

    for reward_name, factor in zip(_names(model.reward_names, 'r'), model.rewards):
        write(f'\n    reward {reward_name} given {given(factor.scope)} {{\n')
        for a, action in enumerate(actions):
            for r, key in enumerate(_keys(factor.shape)):
                write(f'        {action} {key}: {_number(factor.table[a, r])};\n')
        write('    }\n')

    if basis is not None:
        for basis_name, h in zip(_names(basis.names, 'h'), basis.functions):
            write(f'\n    basis {basis_name} given {given(h.scope)} {{\n')
            for r, key in enumerate(_keys(h.table.shape)):
                write(f'        {key}: {_number(h.table.values[r])};\n')
            write('    }\n')

    write('}\n')
    return out.getvalue()
