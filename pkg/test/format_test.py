import pytest

from conftest import SINGLE_STATE, SWAP, random_model
from fmdpy.approx.basis import indicator_basis
from fmdpy.core.model import specs_equal
from fmdpy.env.generators import make_chain, make_sysadmin_ring
from fmdpy.errors import FmdpFormatError
from fmdpy.format.document import IssueCategory, check_fmdp, parse_fmdp
from fmdpy.format.emit import emit_fmdp
from fmdpy.format.parser import lex


def categories(text):
    return [issue.category for issue in check_fmdp(text)]


def test_minimal_document():
    doc = parse_fmdp(SINGLE_STATE)
    assert doc.name == 'single'
    assert doc.model.m == 1
    assert doc.model.num_actions == 1
    assert doc.model.gamma == 0.5
    assert doc.model.r_max == 1.0
    assert doc.model.scope_bound == 1
    assert doc.basis is None


def test_lexer_drops_comments_and_layout():
    names = [token.value for token in lex('fmdp a { # note\n gamma = 0.5; }')]
    assert names == ['fmdp', 'a', '{', 'gamma', '=', '0.5', ';', '}']


def test_row_summing_to_less_than_one():
    text = SWAP.replace('go (1): [0, 1]; }\n    transition b', 'go (1): [0, 0.9]; }\n    transition b')
    issues = check_fmdp(text)
    assert [issue.category for issue in issues] == [IssueCategory.PROBABILITY]
    assert 'transition a' in issues[0].message and '(1)' in issues[0].message
    assert issues[0].lineno == 6


def test_undeclared_variable():
    text = SWAP.replace('transition b given (a)', 'transition b given (c)')
    assert categories(text) == [IssueCategory.REFERENCE]


def test_missing_transition_row():
    text = SWAP.replace(' go (1): [0, 1]; }\n    reward', ' }\n    reward')
    assert categories(text) == [IssueCategory.REFERENCE]


def test_duplicate_declarations():
    assert categories(SWAP.replace('actions { go; }', 'actions { go; go; }')) == [IssueCategory.DUPLICATE]
    assert categories(SWAP.replace('variables { a: 2; b: 2; }', 'variables { a: 2; a: 2; }')) == \
        [IssueCategory.DUPLICATE]


def test_scope_bound_violation():
    text = SWAP.replace('gamma = 0.9;', 'gamma = 0.9; scope_bound = 1;')
    text = text.replace('reward r given (a) { go (1): 1; }', 'reward r given (a, b) { go (1, 1): 1; }')
    assert categories(text) == [IssueCategory.SCOPE_BOUND]


def test_syntax_error_has_a_position():
    issues = check_fmdp('fmdp broken {\n    gamma = ;\n}\n')
    assert [issue.category for issue in issues] == [IssueCategory.SYNTAX]
    assert issues[0].lineno >= 1


def test_missing_gamma_and_bad_ranges():
    assert categories(SWAP.replace('gamma = 0.9;', '')) == [IssueCategory.REFERENCE]
    assert categories(SWAP.replace('gamma = 0.9;', 'gamma = 1.5;')) == [IssueCategory.RANGE]
    assert categories(SWAP.replace('a: 2;', 'a: 2.5;')) == [IssueCategory.RANGE]


def test_keywords_are_not_names():
    with pytest.raises(FmdpFormatError) as info:
        parse_fmdp(SWAP.replace('actions { go; }', 'actions { given; }'))
    assert info.value.issues[0].category is IssueCategory.SYNTAX


@pytest.mark.parametrize('model', [
    make_chain(3, 2, 0.1),
    make_sysadmin_ring(3, 0.05, 0.9),
    random_model(7),
    random_model(8),
])
def test_emit_then_parse_is_structurally_equal(model):
    doc = parse_fmdp(emit_fmdp(model, indicator_basis(model.space)))
    assert specs_equal(doc.model, model)
    assert doc.basis.names == indicator_basis(model.space).names
    assert emit_fmdp(doc.model, doc.basis) == emit_fmdp(model, indicator_basis(model.space))
