"""Concrete syntax for averaged signal temporal logic.

Operators, from tightest to loosest binding::

    !  F G AvF AvG     unary (optionally followed by an interval)
    U R AvU AvR        binary temporal, non-associative
    &
    |
    ->                 right-associative

Intervals are written ``[a,b]`` or ``[a,inf)``; an omitted interval means
``[0,inf)``. Atoms are ``x < r``, ``x <= r``, ``x >= r``, ``x > r`` or a bare
propositional variable ``p`` (shorthand for ``p >= 0``).
"""

import logging
import math

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedEOF, UnexpectedInput, VisitError
from pydantic import ValidationError

from .exceptions import FormulaSyntaxError
from .models.formulas import (
    Always, And, Atom, Eventually, FalseFormula, Formula, Implies, Interval, Not, Or, Release, TrueFormula,
    Until, proposition,
)

__all__ = ("GRAMMAR", "parse", "unparse")

GRAMMAR = r"""
?start: implication

?implication: disjunction
    | disjunction "->" implication              -> implies

?disjunction: conjunction
    | disjunction "|" conjunction               -> or_

?conjunction: binary_temporal
    | conjunction "&" binary_temporal           -> and_

?binary_temporal: unary
    | unary BINARY_TEMPORAL interval? unary     -> binary_temporal

?unary: primary
    | "!" unary                                 -> not_
    | UNARY_TEMPORAL interval? unary            -> unary_temporal

?primary: LITERAL                               -> literal
    | IDENTIFIER RELATION SIGNED_NUMBER          -> comparison
    | IDENTIFIER                                -> propositional
    | "(" implication ")"

interval: "[" SIGNED_NUMBER "," upper_bound
?upper_bound: SIGNED_NUMBER "]"
    | INFINITY ")"
    | INFINITY "]"

LITERAL.3: /(true|false)(?![A-Za-z0-9_])/
UNARY_TEMPORAL.3: /(AvF|AvG|F|G)(?![A-Za-z0-9_])/
BINARY_TEMPORAL.3: /(AvU|AvR|U|R)(?![A-Za-z0-9_])/
INFINITY.2: /inf(?![A-Za-z0-9_])/
IDENTIFIER: /[A-Za-z_][A-Za-z0-9_]*/
RELATION: "<=" | ">=" | "<" | ">"

%import common.SIGNED_NUMBER
%import common.WS
%ignore WS
"""


class _SyntaxBuilder(Transformer):
    """Turns the lark parse tree into formula nodes."""

    @v_args(inline=True)
    def implies(self, left, right):
        return Implies(left=left, right=right)

    @v_args(inline=True)
    def or_(self, left, right):
        return Or(left=left, right=right)

    @v_args(inline=True)
    def and_(self, left, right):
        return And(left=left, right=right)

    @v_args(inline=True)
    def not_(self, operand):
        return Not(operand=operand)

    def unary_temporal(self, children):
        token, *rest = children
        interval = rest[0] if len(rest) == 2 else Interval()
        node = Eventually if token.value.endswith("F") else Always

        return node(interval=interval, operand=rest[-1], is_averaged=token.value.startswith("Av"))

    def binary_temporal(self, children):
        left, token, *rest = children
        interval = rest[0] if len(rest) == 2 else Interval()
        node = Until if token.value.endswith("U") else Release

        return node(interval=interval, left=left, right=rest[-1], is_averaged=token.value.startswith("Av"))

    def interval(self, children):
        lo_token, hi_token = children
        lo = float(lo_token)
        hi = math.inf if hi_token.type == "INFINITY" else float(hi_token)

        if lo < 0 or hi < 0:
            raise FormulaSyntaxError("interval endpoints cannot be negative", lo_token.line, lo_token.column)

        if hi == lo:
            raise FormulaSyntaxError(f"singular interval [{lo_token},{hi_token}]", lo_token.line, lo_token.column)

        try:
            return Interval(lo=lo, hi=hi)
        except ValidationError as e:
            raise FormulaSyntaxError(f"invalid interval: {e.errors()[0]['msg']}",
                                     lo_token.line, lo_token.column) from e

    @v_args(inline=True)
    def literal(self, token: Token):
        return TrueFormula() if token.value == "true" else FalseFormula()

    @v_args(inline=True)
    def comparison(self, variable: Token, relation: Token, threshold: Token):
        return Atom(variable=variable.value, relation=relation.value, threshold=float(threshold))

    @v_args(inline=True)
    def propositional(self, variable: Token):
        return proposition(variable.value)


_PARSER = Lark(GRAMMAR, parser="lalr", transformer=_SyntaxBuilder())


def parse(text: str) -> Formula:
    """Parse formula text.

    Args:
        text (str): Formula in the concrete syntax described in this module.

    Returns:
        Formula: The abstract syntax tree.

    Raises:
        FormulaSyntaxError: On any syntax error, singular interval or negative endpoint.
    """

    try:
        formula = _PARSER.parse(text)
    except UnexpectedEOF as e:
        raise FormulaSyntaxError("unexpected end of formula", *_end_position(text)) from e
    except UnexpectedInput as e:
        raise FormulaSyntaxError(f"unexpected input {_excerpt(text, e.pos_in_stream)!r}", e.line, e.column) from e
    except VisitError as e:
        if isinstance(e.orig_exc, FormulaSyntaxError):
            raise e.orig_exc from e

        raise FormulaSyntaxError(str(e.orig_exc)) from e
    except ValidationError as e:
        raise FormulaSyntaxError(f"invalid formula: {e.errors()[0]['msg']}") from e

    logging.debug(f"Parsed formula {text!r}")

    return formula


def _excerpt(text: str, position: int | None) -> str:
    if position is None:
        return text[-10:]

    return text[position:position + 10]


def _end_position(text: str) -> tuple[int, int]:
    lines = text.split("\n")

    return len(lines), len(lines[-1]) + 1


def unparse(formula: Formula) -> str:
    """Render a formula so that ``parse(unparse(f)) == f``."""

    match formula:
        case TrueFormula():
            return "true"
        case FalseFormula():
            return "false"
        case Atom(propositional=True):
            return formula.variable
        case Atom():
            return f"{formula.variable} {formula.relation} {formula.threshold!r}"
        case Not():
            return f"!{unparse(formula.operand)}"
        case Implies():
            return f"({unparse(formula.left)} -> {unparse(formula.right)})"
        case And():
            return f"({unparse(formula.left)} & {unparse(formula.right)})"
        case Or():
            return f"({unparse(formula.left)} | {unparse(formula.right)})"
        case Eventually() | Always():
            symbol = ("Av" if formula.is_averaged else "") + ("F" if isinstance(formula, Eventually) else "G")

            return f"{symbol}{formula.interval} {unparse(formula.operand)}"
        case Until() | Release():
            symbol = ("Av" if formula.is_averaged else "") + ("U" if isinstance(formula, Until) else "R")

            return f"({unparse(formula.left)} {symbol}{formula.interval} {unparse(formula.right)})"

    raise TypeError(f"cannot render {type(formula).__name__}")
