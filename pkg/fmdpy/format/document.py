"""
FMDP description documents: syntax tree to model, with every problem found
reported as an `Issue` rather than stopping at the first one.
"""
import typing as t
from enum import Enum, auto as _auto
from typing import NamedTuple

import numpy as np

from fmdpy.approx.basis import BasisFunction, BasisSet
from fmdpy.core.model import FmdpSpec, ViolationKind, validate_model
from fmdpy.core.space import VariableSpace, local_index
from fmdpy.core.tables import LocalTable, RewardFactor, TransitionFactor
from fmdpy.errors import DegenerateBasisError, FmdpError, FmdpFormatError
from fmdpy.format import helper as syntax
from fmdpy.format.parser import parse

PROBABILITY_TOLERANCE = 1e-9


class IssueCategory(Enum):
    SYNTAX = _auto()
    REFERENCE = _auto()
    PROBABILITY = _auto()
    SCOPE_BOUND = _auto()
    DUPLICATE = _auto()
    RANGE = _auto()


class Issue(NamedTuple):
    category: IssueCategory
    lineno: int
    colno: int
    message: str

    def __str__(self):
        return f'{self.lineno}:{self.colno}: {self.category.name}: {self.message}'


class FmdpDocument(NamedTuple):
    name: str
    model: FmdpSpec
    # None when the document declares no basis functions
    basis: t.Optional[BasisSet]


def _key_text(key: t.List[syntax.Number]) -> str:
    return '(' + ', '.join(number.text for number in key) + ')'


class _Builder:

    def __init__(self):
        self.issues: t.List[Issue] = []

    def report(self, category: IssueCategory, node, message: str):
        self.issues.append(Issue(category, node.lineno, node.colno, message))

    def integer(self, number: syntax.Number, low: int, high: t.Optional[int], what: str) -> t.Optional[int]:
        value = number.value
        if not np.isfinite(value) or value != int(value):
            self.report(IssueCategory.RANGE, number, f'{what} must be an integer, got {number.text}')
            return None
        value = int(value)
        if value < low or (high is not None and value >= high):
            bound = f'[{low}, {high})' if high is not None else f'>= {low}'
            self.report(IssueCategory.RANGE, number, f'{what} = {value} not in {bound}')
            return None
        return value

    def unique(self, nodes: t.Iterable[syntax.Named], what: str) -> t.Dict[str, int]:
        index = {}
        for node in nodes:
            if node.name in index:
                self.report(IssueCategory.DUPLICATE, node, f'{what} {node.name!r} declared twice')
                continue
            index[node.name] = len(index)
        return index

    def only_one(self, items, kind, what: str):
        found = [each for each in items if isinstance(each, kind)]
        for extra in found[1:]:
            self.report(IssueCategory.DUPLICATE, extra, f'second {what} section')
        return found[0] if found else None

    def resolve_given(self, given: t.List[syntax.Named], variables: t.Dict[str, int], where: str):
        indices = []
        seen = set()
        for node in given:
            if node.name not in variables:
                self.report(IssueCategory.REFERENCE, node, f'{where}: unknown variable {node.name!r}')
                return None
            if node.name in seen:
                self.report(IssueCategory.DUPLICATE, node, f'{where}: variable {node.name!r} given twice')
                return None
            seen.add(node.name)
            indices.append(variables[node.name])
        return indices

    def resolve_key(self, key: t.List[syntax.Number], given: t.List[int], space: VariableSpace, node, where: str):
        """the local row index of a key written in `given` order."""
        if len(key) != len(given):
            self.report(IssueCategory.RANGE, node, f'{where}: key has {len(key)} values, expected {len(given)}')
            return None
        x = [0] * space.m
        for number, i in zip(key, given):
            value = self.integer(number, 0, space.sizes[i], f'{where}: value of variable {i}')
            if value is None:
                return None
            x[i] = value
        scope = tuple(sorted(given))
        return local_index(x, scope, space.scope_sizes(scope))

    def action(self, node: syntax.Named, actions: t.Dict[str, int], where: str) -> t.Optional[int]:
        if node.name not in actions:
            self.report(IssueCategory.REFERENCE, node, f'{where}: unknown action {node.name!r}')
            return None
        return actions[node.name]

    def transition(self, item: syntax.Transition, variables, actions, space: VariableSpace):
        where = f'transition {item.target.name}'
        given = self.resolve_given(item.given, variables, where)
        if given is None:
            return None
        scope = tuple(sorted(given))
        target = variables[item.target.name]
        n = space.sizes[target]
        rows = np.full((len(actions), space.scope_size(scope), n), np.nan)
        for row in item.rows:
            a = self.action(row.action, actions, where)
            r = self.resolve_key(row.key, given, space, row.action, where)
            if a is None or r is None:
                continue
            if len(row.probs) != n:
                self.report(IssueCategory.RANGE, row.action, f'{where}: {len(row.probs)} probabilities, expected {n}')
                continue
            if not np.isnan(rows[a, r, 0]):
                self.report(IssueCategory.DUPLICATE, row.action, f'{where}: row for {row.action.name} written twice')
                continue
            probs = np.array([p.value for p in row.probs])
            if (probs < 0).any() or not np.all(np.isfinite(probs)):
                self.report(IssueCategory.PROBABILITY, row.action, f'{where}: negative or invalid probability')
            elif abs(probs.sum() - 1.0) > PROBABILITY_TOLERANCE:
                self.report(IssueCategory.PROBABILITY, row.action,
                            f'{where}: row {row.action.name} {_key_text(row.key)} sums to {probs.sum()!r}')
            rows[a, r] = probs
        missing = np.argwhere(np.isnan(rows[:, :, 0]))
        if missing.size:
            a, r = missing[0]
            self.report(IssueCategory.REFERENCE, item,
                        f'{where}: {len(missing)} row(s) missing, first: action {a}, row {r}')
            return None
        return TransitionFactor(target, scope, space.scope_sizes(scope), rows)

    def reward(self, item: syntax.Reward, variables, actions, space: VariableSpace):
        where = f'reward {item.name.name}'
        given = self.resolve_given(item.given, variables, where)
        if given is None:
            return None
        scope = tuple(sorted(given))
        # rows that are not written pay nothing
        table = np.zeros((len(actions), space.scope_size(scope)))
        written = set()
        for row in item.rows:
            a = self.action(row.action, actions, where)
            r = self.resolve_key(row.key, given, space, row.action, where)
            if a is None or r is None:
                continue
            if (a, r) in written:
                self.report(IssueCategory.DUPLICATE, row.action, f'{where}: row for {row.action.name} written twice')
                continue
            written.add((a, r))
            if not row.value.value >= 0 or not np.isfinite(row.value.value):
                self.report(IssueCategory.RANGE, row.value, f'{where}: reward {row.value.text} is negative')
            table[a, r] = row.value.value
        return RewardFactor(scope, space.scope_sizes(scope), table)

    def basis(self, item: syntax.Basis, variables, space: VariableSpace):
        where = f'basis {item.name.name}'
        given = self.resolve_given(item.given, variables, where)
        if given is None:
            return None
        scope = tuple(sorted(given))
        values = np.zeros(space.scope_size(scope))
        written = set()
        for row in item.rows:
            r = self.resolve_key(row.key, given, space, row.value, where)
            if r is None:
                continue
            if r in written:
                self.report(IssueCategory.DUPLICATE, row.value, f'{where}: value written twice')
                continue
            written.add(r)
            values[r] = row.value.value
        return BasisFunction(item.name.name, LocalTable(scope, space.scope_sizes(scope), values))

    def build(self, doc: syntax.Document) -> t.Optional[FmdpDocument]:
        items = doc.items
        settings = {}
        for each in items:
            if isinstance(each, syntax.Setting):
                if each.key in settings:
                    self.report(IssueCategory.DUPLICATE, each, f'{each.key} set twice')
                    continue
                settings[each.key] = each.value

        variables_node = self.only_one(items, syntax.Variables, 'variables')
        actions_node = self.only_one(items, syntax.Actions, 'actions')
        start_node = self.only_one(items, syntax.Start, 'start')
        if variables_node is None or not variables_node.decls:
            self.report(IssueCategory.REFERENCE, doc.name, 'no variables declared')
            return None
        if actions_node is None or not actions_node.names:
            self.report(IssueCategory.REFERENCE, doc.name, 'no actions declared')
            return None

        variables = self.unique((decl.var for decl in variables_node.decls), 'variable')
        actions = self.unique(actions_node.names, 'action')
        sizes = [self.integer(decl.size, 1, None, f'size of {decl.var.name}') for decl in variables_node.decls]
        if len(variables) != len(variables_node.decls) or None in sizes:
            return None
        space = VariableSpace.of(sizes)

        gamma = settings.get('gamma')
        if gamma is None:
            self.report(IssueCategory.REFERENCE, doc.name, 'no gamma setting')
        elif not 0 <= gamma.value < 1:
            self.report(IssueCategory.RANGE, gamma, f'gamma = {gamma.text} not in [0, 1)')

        start = [0] * space.m
        if start_node is not None:
            for decl in start_node.decls:
                if decl.var.name not in variables:
                    self.report(IssueCategory.REFERENCE, decl.var, f'start: unknown variable {decl.var.name!r}')
                    continue
                i = variables[decl.var.name]
                value = self.integer(decl.value, 0, space.sizes[i], f'start value of {decl.var.name}')
                if value is not None:
                    start[i] = value

        transitions = {}
        for each in items:
            if not isinstance(each, syntax.Transition):
                continue
            if each.target.name not in variables:
                self.report(IssueCategory.REFERENCE, each.target, f'transition for unknown variable {each.target.name!r}')
                continue
            if each.target.name in transitions:
                self.report(IssueCategory.DUPLICATE, each.target, f'second transition for {each.target.name!r}')
                continue
            transitions[each.target.name] = self.transition(each, variables, actions, space)
        for decl in variables_node.decls:
            if decl.var.name not in transitions:
                self.report(IssueCategory.REFERENCE, decl.var, f'no transition for variable {decl.var.name!r}')

        reward_nodes = [each for each in items if isinstance(each, syntax.Reward)]
        self.unique((each.name for each in reward_nodes), 'reward')
        rewards = [self.reward(each, variables, actions, space) for each in reward_nodes]

        basis_nodes = [each for each in items if isinstance(each, syntax.Basis)]
        self.unique((each.name for each in basis_nodes), 'basis function')
        functions = [self.basis(each, variables, space) for each in basis_nodes]

        if self.issues or None in rewards or None in functions or None in transitions.values():
            return None

        scopes = [f.scope for f in transitions.values()] + [r.scope for r in rewards]
        largest_reward = max((float(r.table.max()) for r in rewards if r.table.size), default=0.0)
        r_max = settings['rmax'].value if 'rmax' in settings else largest_reward
        if 'scope_bound' in settings:
            scope_bound = self.integer(settings['scope_bound'], 1, None, 'scope_bound')
            if scope_bound is None:
                return None
        else:
            scope_bound = max(1, max(len(scope) for scope in scopes))

        model = FmdpSpec(
            space=space,
            num_actions=len(actions),
            transitions=tuple(transitions[decl.var.name] for decl in variables_node.decls),
            rewards=tuple(rewards),
            gamma=gamma.value,
            start=tuple(start),
            scope_bound=scope_bound,
            r_max=r_max,
            variable_names=tuple(variables),
            action_names=tuple(actions),
            reward_names=tuple(each.name.name for each in reward_nodes),
        )
        for violation in validate_model(model, PROBABILITY_TOLERANCE):
            category = {
                ViolationKind.SCOPE_BOUND: IssueCategory.SCOPE_BOUND,
                ViolationKind.ROW_SUM: IssueCategory.PROBABILITY,
                ViolationKind.NEGATIVE_PROBABILITY: IssueCategory.PROBABILITY,
            }.get(violation.kind, IssueCategory.RANGE)
            self.report(category, doc.name, f'{violation.where}: {violation.message}')

        basis = None
        if functions:
            try:
                basis = BasisSet.of(functions)
            except DegenerateBasisError as e:
                self.report(IssueCategory.RANGE, basis_nodes[0], str(e))
        return None if self.issues else FmdpDocument(doc.name.name, model, basis)


def _syntax_issue(e: SyntaxError) -> Issue:
    return Issue(IssueCategory.SYNTAX, e.lineno or 1, e.offset or 0, e.msg or 'invalid syntax')


def check_fmdp(text: str, filename: str = None) -> t.List[Issue]:
    """
    every issue found in a document, in source order; empty means it is valid.

    title: check document
    prepare:
    >>> from fmdpy.format.document import check_fmdp, IssueCategory
    test:
    >>> text = '''
    >>> fmdp coin {
    >>>     gamma = 0.9;
    >>>     variables { x: 2; }
    >>>     actions { flip; }
    >>>     transition x given (x) { flip (0): [0.5, 0.5]; flip (1): [0.5, 0.6]; }
    >>> }
    >>> '''
    >>> issues = check_fmdp(text)
    >>> assert [each.category for each in issues] == [IssueCategory.PROBABILITY]
    >>> assert issues[0].lineno == 6
    >>> assert check_fmdp('fmdp broken {')[0].category is IssueCategory.SYNTAX
    """
    try:
        doc = parse(text, filename).result
    except SyntaxError as e:
        return [_syntax_issue(e)]
    builder = _Builder()
    try:
        builder.build(doc)
    except FmdpError as e:
        builder.issues.append(Issue(IssueCategory.RANGE, doc.name.lineno, doc.name.colno, str(e)))
    return sorted(builder.issues, key=lambda issue: (issue.lineno, issue.colno))


def parse_fmdp(text: str, filename: str = None) -> FmdpDocument:
    try:
        doc = parse(text, filename).result
    except SyntaxError as e:
        raise FmdpFormatError([_syntax_issue(e)]) from None
    builder = _Builder()
    try:
        built = builder.build(doc)
    except FmdpError as e:
        builder.issues.append(Issue(IssueCategory.RANGE, doc.name.lineno, doc.name.colno, str(e)))
        built = None
    if built is None:
        raise FmdpFormatError(sorted(builder.issues, key=lambda issue: (issue.lineno, issue.colno)))
    return built
