"""
syntax nodes of an FMDP document and the rewrites the grammar calls.
positions are the 1-based line and 0-based column of a node's first token.
"""
import typing as t
from typing import NamedTuple

from rbnf.core.Tokenizer import Tokenizer


class Loc:

    def __matmul__(self, other: Tokenizer):
        return {'lineno': other.lineno, 'colno': other.colno}


loc = Loc()


class Named(NamedTuple):
    name: str
    lineno: int
    colno: int


class Number(NamedTuple):
    text: str
    value: float
    lineno: int
    colno: int


class Setting(NamedTuple):
    key: str
    value: Number
    lineno: int
    colno: int


class VariableDecl(NamedTuple):
    var: Named
    size: Number


class Variables(NamedTuple):
    decls: t.List[VariableDecl]
    lineno: int
    colno: int


class Actions(NamedTuple):
    names: t.List[Named]
    lineno: int
    colno: int


class StartDecl(NamedTuple):
    var: Named
    value: Number


class Start(NamedTuple):
    decls: t.List[StartDecl]
    lineno: int
    colno: int


class TransitionRow(NamedTuple):
    action: Named
    key: t.List[Number]
    probs: t.List[Number]


class Transition(NamedTuple):
    target: Named
    given: t.List[Named]
    rows: t.List[TransitionRow]
    lineno: int
    colno: int


class RewardRow(NamedTuple):
    action: Named
    key: t.List[Number]
    value: Number


class Reward(NamedTuple):
    name: Named
    given: t.List[Named]
    rows: t.List[RewardRow]
    lineno: int
    colno: int


class BasisRow(NamedTuple):
    key: t.List[Number]
    value: Number


class Basis(NamedTuple):
    name: Named
    given: t.List[Named]
    rows: t.List[BasisRow]
    lineno: int
    colno: int


class Document(NamedTuple):
    name: Named
    items: t.List[NamedTuple]


def named(token: Tokenizer) -> Named:
    return Named(token.value, **loc @ token)


def number_rewrite(neg: t.Optional[Tokenizer], token: Tokenizer) -> Number:
    text = ('-' if neg else '') + token.value
    head = neg or token
    try:
        value = float(text)
    except ValueError:
        # imaginary literals and the like; rejected when the model is built
        value = float('nan')
    return Number(text, value, **loc @ head)


def key_rewrite(values: t.Optional[t.List[Tokenizer]]) -> t.List[Number]:
    return [number_rewrite(None, each) for each in values or []]
