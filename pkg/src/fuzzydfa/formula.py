"""ASTs for fuzzy transfer functions, plus parsing, printing and evaluation.

The connectives are interpreted through a :class:`~fuzzydfa.truth.LogicFamily`:
``And`` -> T-norm, ``Or`` -> S-norm, ``Not`` -> complement.  Evaluation comes
in a scalar and an interval flavour; the interval flavour lifts scalar
constants to degenerate intervals.

Text syntax (used by problem files)::

    formula := or
    or      := and ('|' and)*
    and     := unary ('&' unary)*
    unary   := '!' unary | NUMBER | IDENT | '(' or ')'

Precedence is ``!`` > ``&`` > ``|``; both binary connectives fold left.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from .truth import LogicFamily, TruthInterval, truth_value

__all__ = [
    "Formula",
    "Var",
    "Const",
    "Not",
    "And",
    "Or",
    "and_all",
    "or_all",
    "free_vars",
    "evaluate",
    "evaluate_interval",
    "format_formula",
    "parse_formula",
    "UnboundVariableError",
    "FormulaSyntaxError",
]


class UnboundVariableError(LookupError):
    """A formula referenced a property the valuation does not define."""

    def __init__(self, name: str):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


class FormulaSyntaxError(ValueError):
    """Parse error carrying 1-based line/column of the offending token."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Formula:
    """Base class; concrete nodes are Var, Const, Not, And, Or."""

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)


@dataclass(frozen=True)
class Var(Formula):
    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("variable name must be nonempty")


@dataclass(frozen=True)
class Const(Formula):
    value: Union[float, TruthInterval]

    def __post_init__(self) -> None:
        if not isinstance(self.value, TruthInterval):
            object.__setattr__(self, "value", truth_value(self.value))


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


def and_all(parts: Iterable[Formula]) -> Formula:
    """Left fold of ``&`` over ``parts``; empty input is the AND identity 1."""
    acc = None
    for part in parts:
        acc = part if acc is None else And(acc, part)
    return Const(1.0) if acc is None else acc


def or_all(parts: Iterable[Formula]) -> Formula:
    """Left fold of ``|`` over ``parts``; empty input is the OR identity 0."""
    acc = None
    for part in parts:
        acc = part if acc is None else Or(acc, part)
    return Const(0.0) if acc is None else acc


def free_vars(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.name)
        elif isinstance(node, Not):
            stack.append(node.arg)
        elif isinstance(node, (And, Or)):
            stack.append(node.left)
            stack.append(node.right)
    return frozenset(out)


def evaluate(f: Formula, family: LogicFamily, valuation: Mapping[str, float]) -> float:
    """Scalar interpretation of ``f`` under ``valuation``.

    Raises UnboundVariableError for missing properties and TypeError if the
    formula contains interval constants.
    """
    if isinstance(f, Var):
        try:
            return valuation[f.name]
        except KeyError:
            raise UnboundVariableError(f.name) from None
    if isinstance(f, Const):
        if isinstance(f.value, TruthInterval):
            raise TypeError("interval constant in scalar evaluation")
        return f.value
    if isinstance(f, Not):
        return family.cnorm(evaluate(f.arg, family, valuation))
    if isinstance(f, And):
        return family.tnorm(evaluate(f.left, family, valuation), evaluate(f.right, family, valuation))
    if isinstance(f, Or):
        return family.snorm(evaluate(f.left, family, valuation), evaluate(f.right, family, valuation))
    raise TypeError(f"not a formula node: {f!r}")


def evaluate_interval(
    f: Formula, family: LogicFamily, valuation: Mapping[str, TruthInterval]
) -> TruthInterval:
    """Interval interpretation; scalar constants are lifted to [c, c]."""
    if isinstance(f, Var):
        try:
            return valuation[f.name]
        except KeyError:
            raise UnboundVariableError(f.name) from None
    if isinstance(f, Const):
        if isinstance(f.value, TruthInterval):
            return f.value
        return TruthInterval(f.value, f.value)
    if isinstance(f, Not):
        return family.interval_cnorm(evaluate_interval(f.arg, family, valuation))
    if isinstance(f, And):
        return family.interval_tnorm(
            evaluate_interval(f.left, family, valuation),
            evaluate_interval(f.right, family, valuation),
        )
    if isinstance(f, Or):
        return family.interval_snorm(
            evaluate_interval(f.left, family, valuation),
            evaluate_interval(f.right, family, valuation),
        )
    raise TypeError(f"not a formula node: {f!r}")


# -- printing ---------------------------------------------------------------

_PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3


def format_formula(f: Formula) -> str:
    """Render ``f`` in the text syntax; parse_formula(format_formula(f)) == f."""

    def fmt(node: Formula, parent_prec: int) -> str:
        if isinstance(node, Var):
            return node.name
        if isinstance(node, Const):
            if isinstance(node.value, TruthInterval):
                raise TypeError("interval constants have no text form")
            return repr(node.value)
        if isinstance(node, Not):
            return "!" + fmt(node.arg, _PREC_UNARY)
        if isinstance(node, And):
            text = f"{fmt(node.left, _PREC_AND)} & {fmt(node.right, _PREC_AND + 1)}"
            return f"({text})" if parent_prec > _PREC_AND else text
        if isinstance(node, Or):
            text = f"{fmt(node.left, _PREC_OR)} | {fmt(node.right, _PREC_OR + 1)}"
            return f"({text})" if parent_prec > _PREC_OR else text
        raise TypeError(f"not a formula node: {node!r}")

    return fmt(f, 0)


# -- parsing ----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[!&|()])"
)


def _tokenize(text: str) -> list[tuple[str, str, int, int]]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        value = m.group()
        if kind != "ws":
            tokens.append((kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(("end", "", line, col))
    return tokens


def parse_formula(text: str) -> Formula:
    """Parse the text syntax into a Formula; errors carry line/column."""
    tokens = _tokenize(text)
    index = 0

    def peek() -> tuple[str, str, int, int]:
        return tokens[index]

    def advance() -> tuple[str, str, int, int]:
        nonlocal index
        tok = tokens[index]
        index += 1
        return tok

    def parse_or() -> Formula:
        node = parse_and()
        while peek()[:2] == ("op", "|"):
            advance()
            node = Or(node, parse_and())
        return node

    def parse_and() -> Formula:
        node = parse_unary()
        while peek()[:2] == ("op", "&"):
            advance()
            node = And(node, parse_unary())
        return node

    def parse_unary() -> Formula:
        kind, value, line, col = peek()
        if (kind, value) == ("op", "!"):
            advance()
            return Not(parse_unary())
        if kind == "num":
            advance()
            try:
                return Const(float(value))
            except ValueError as exc:
                raise FormulaSyntaxError(str(exc), line, col) from None
        if kind == "ident":
            advance()
            return Var(value)
        if (kind, value) == ("op", "("):
            advance()
            node = parse_or()
            kind2, value2, line2, col2 = peek()
            if (kind2, value2) != ("op", ")"):
                raise FormulaSyntaxError("expected ')'", line2, col2)
            advance()
            return node
        raise FormulaSyntaxError(
            f"expected a constant, identifier, '!' or '(', got {value!r}" if kind != "end"
            else "unexpected end of formula",
            line,
            col,
        )

    node = parse_or()
    kind, value, line, col = peek()
    if kind != "end":
        raise FormulaSyntaxError(f"trailing input {value!r}", line, col)
    return node
