import io
import tokenize
import typing as t

from rbnf.core.CachingPool import ConstStrPool
from rbnf.core.State import State
from rbnf.core.Tokenizer import Tokenizer
from rbnf.easy import Language, build_language, ze
from rbnf.edsl.rbnf_analyze import check_parsing_complete

from fmdpy.format import helper
from fmdpy.format.grammar import RBNF

cast = ConstStrPool.cast_to_const
KEYWORDS = frozenset(
    {'fmdp', 'gamma', 'rmax', 'scope_bound', 'variables', 'actions', 'start', 'transition', 'reward', 'basis', 'given'})


def to_rbnf_token(tk: tokenize.TokenInfo) -> Tokenizer:
    name = cast(tokenize.tok_name[tk.type])
    if name == 'NAME' and tk.string in KEYWORDS:
        value = cast(tk.string)
        name = cast('KEYWORD')
    else:
        value = cast(tk.string) if name not in ('NAME', 'NUMBER') else tk.string
    return Tokenizer(name, value, *tk.start)


# layout carries no meaning in a document
tokens_to_ignore = (tokenize.COMMENT, tokenize.ENCODING, tokenize.NL, tokenize.NEWLINE, tokenize.INDENT,
                    tokenize.DEDENT, tokenize.ENDMARKER)


def not_to_ignore(tk: tokenize.TokenInfo) -> bool:
    return tk.type not in tokens_to_ignore


def lex(text: t.Union[str, bytes]) -> t.Tuple[Tokenizer, ...]:
    if isinstance(text, str):
        text = text.encode()
    stream = io.BytesIO(text)
    return tuple(map(to_rbnf_token, filter(not_to_ignore, tokenize.tokenize(stream.__next__))))


fmdp = Language('fmdp')
fmdp.namespace.update(helper.__dict__)
build_language(RBNF, fmdp, '<grammar>')
document_parser = fmdp.named_parsers['document']
fmdp.as_fixed()


def _find_error(tokens, state) -> t.Tuple[int, int]:
    if not tokens:
        return 1, 0
    max_fetched = state.max_fetched
    tk: Tokenizer = tokens[-1] if max_fetched >= len(tokens) else tokens[max_fetched]
    return tk.lineno, tk.colno


def parse(text: str, filename: str = None) -> ze.ResultDescription:
    """
    the syntax tree of a document; a SyntaxError carries the position of the
    furthest token the parser reached.

    title: parse document
    prepare:
    >>> from fmdpy.format.parser import parse
    test:
    >>> doc = parse('fmdp tiny { gamma = 0.5; variables { x: 2; } actions { go; } }').result
    >>> assert doc.name.name == 'tiny'
    >>> assert [type(each).__name__ for each in doc.items] == ['Setting', 'Variables', 'Actions']
    """
    filename = filename or '<unknown>'
    text = text + '\n'
    try:
        tokens = lex(text)
    except tokenize.TokenError as e:
        exc = SyntaxError(f'cannot tokenize: {e.args[0]}')
        exc.filename = filename
        exc.lineno, exc.offset = e.args[1]
        raise exc from None
    except SyntaxError as e:
        e.filename = filename
        raise e
    if not tokens:
        exc = SyntaxError('empty document')
        exc.filename, exc.lineno, exc.offset = filename, 1, 0
        raise exc

    state = State(fmdp.implementation, filename=filename)
    try:
        parsed = document_parser.match(tokens, state)
        check_parsing_complete(text, tokens, state)
    except SyntaxError as e:
        e.filename = filename
        e.lineno, e.offset = _find_error(tokens, state)
        e.__traceback__ = None
        raise e
    return ze.ResultDescription(state, parsed.value, tokens)
