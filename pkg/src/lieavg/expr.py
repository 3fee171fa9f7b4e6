"""Small arithmetic expression language for scenario files.

Scalar quantities that scenarios declare as strings (forcing components,
potentials, connection entries, functional densities) are parsed once into
an immutable AST and evaluated many times against a variable environment.

Grammar (standard precedence, ^ binds tightest and is right-associative,
unary minus binds between ^ and * /):

    expr    := term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := '-' factor | power
    power   := atom ('^' factor)?
    atom    := NUMBER | NAME '(' expr ')' | NAME | '(' expr ')'

Functions: sin, cos, exp, abs.  The names `pi` and `e` are predefined
constants (radians everywhere).  There is no symbolic differentiation or
simplification; evaluation is plain IEEE double arithmetic.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

__all__ = [
    "Expression",
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "ExprSyntaxError",
    "EvaluationError",
    "parse",
    "evaluate",
]

FUNCTIONS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "abs": math.fabs,
}

CONSTANTS = {
    "pi": math.pi,
    "e": math.e,
}


class ExprSyntaxError(ValueError):
    """Parse failure; `column` is the 1-based offset into the source."""

    def __init__(self, message, column):
        super().__init__(f"{message} (column {column})")
        self.column = column


class EvaluationError(ValueError):
    """Evaluation failure: unbound variable, division by zero, 0^negative."""


class Expression:
    """Immutable AST node.  Subclasses: Num, Var, Neg, BinOp, Call."""

    def evaluate(self, env):
        """Evaluate against `env` (name -> number).  Raises EvaluationError."""
        raise NotImplementedError

    @property
    def free_variables(self):
        """Frozenset of variable names (predefined constants excluded)."""
        names = set()
        _collect_vars(self, names)
        return frozenset(names)

    def __str__(self):
        return _unparse(self, 0)


@dataclass(frozen=True)
class Num(Expression):
    value: float

    def evaluate(self, env):
        return self.value


@dataclass(frozen=True)
class Var(Expression):
    name: str

    def evaluate(self, env):
        if self.name in CONSTANTS:
            return CONSTANTS[self.name]
        try:
            return float(env[self.name])
        except KeyError:
            raise EvaluationError(f"unbound variable '{self.name}'") from None


@dataclass(frozen=True)
class Neg(Expression):
    operand: Expression

    def evaluate(self, env):
        return -self.operand.evaluate(env)


@dataclass(frozen=True)
class BinOp(Expression):
    op: str
    left: Expression
    right: Expression

    def evaluate(self, env):
        a = self.left.evaluate(env)
        b = self.right.evaluate(env)
        if self.op == "+":
            return a + b
        if self.op == "-":
            return a - b
        if self.op == "*":
            return a * b
        if self.op == "/":
            if b == 0.0:
                raise EvaluationError("division by zero")
            return a / b
        return _power(a, b)


@dataclass(frozen=True)
class Call(Expression):
    func: str
    arg: Expression

    def evaluate(self, env):
        return FUNCTIONS[self.func](self.arg.evaluate(env))


def _power(a, b):
    if a == 0.0 and b < 0.0:
        raise EvaluationError("0 raised to a negative power")
    try:
        return math.pow(a, b)
    except OverflowError:
        return math.inf if a > 0.0 or b == round(b) else math.nan
    except ValueError:
        # negative base, non-integer exponent: IEEE quiet NaN
        return math.nan


def _collect_vars(e, out):
    if isinstance(e, Var):
        if e.name not in CONSTANTS:
            out.add(e.name)
    elif isinstance(e, Neg):
        _collect_vars(e.operand, out)
    elif isinstance(e, BinOp):
        _collect_vars(e.left, out)
        _collect_vars(e.right, out)
    elif isinstance(e, Call):
        _collect_vars(e.arg, out)


# ---------------------------------------------------------------------------
# tokenizer / recursive-descent parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


class _Parser:
    def __init__(self, source):
        self.source = source
        self.tokens = []  # (kind, text, 1-based column)
        pos = 0
        while pos < len(source):
            m = _TOKEN_RE.match(source, pos)
            if m is None or m.end() == pos:
                # skip to the first non-space offending character
                bad = pos
                while bad < len(source) and source[bad].isspace():
                    bad += 1
                raise ExprSyntaxError(
                    f"unexpected character '{source[bad]}'", bad + 1
                )
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind) + 1))
            pos = m.end()
        self.tokens.append(("eof", "", len(source) + 1))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, text):
        kind, value, col = self.peek()
        if kind != "op" or value != text:
            shown = value if kind != "eof" else "end of input"
            raise ExprSyntaxError(f"expected '{text}', found {shown}", col)
        return self.advance()

    def parse_expr(self):
        node = self.parse_term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                node = BinOp(value, node, self.parse_term())
            else:
                return node

    def parse_term(self):
        node = self.parse_factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.advance()
                node = BinOp(value, node, self.parse_factor())
            else:
                return node

    def parse_factor(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return Neg(self.parse_factor())
        return self.parse_power()

    def parse_power(self):
        node = self.parse_atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.advance()
            # exponent admits unary minus: 2^-3
            return BinOp("^", node, self.parse_factor())
        return node

    def parse_atom(self):
        kind, value, col = self.advance()
        if kind == "num":
            return Num(float(value))
        if kind == "name":
            nkind, nvalue, _ = self.peek()
            if nkind == "op" and nvalue == "(":
                if value not in FUNCTIONS:
                    raise ExprSyntaxError(f"unknown function '{value}'", col)
                self.advance()
                arg = self.parse_expr()
                self.expect_op(")")
                return Call(value, arg)
            return Var(value)
        if kind == "op" and value == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        shown = value if kind != "eof" else "end of input"
        raise ExprSyntaxError(f"expected expression, found {shown}", col)


def parse(source: str) -> Expression:
    """Parse `source` into an Expression.

    Raises ExprSyntaxError with a 1-based column on malformed input or an
    unknown function name.
    """
    p = _Parser(source)
    node = p.parse_expr()
    kind, value, col = p.peek()
    if kind != "eof":
        raise ExprSyntaxError(f"unexpected trailing input '{value}'", col)
    return node


def evaluate(e: Expression, env) -> float:
    """Evaluate `e` with variables bound by `env` (mapping name -> number)."""
    return e.evaluate(env)


def _unparse(e, parent_prec):
    if isinstance(e, Num):
        text, prec = repr(e.value), _PREC_ATOM
    elif isinstance(e, Var):
        text, prec = e.name, _PREC_ATOM
    elif isinstance(e, Call):
        text, prec = f"{e.func}({_unparse(e.arg, 0)})", _PREC_ATOM
    elif isinstance(e, Neg):
        text, prec = "-" + _unparse(e.operand, _PREC_NEG), _PREC_NEG
    else:
        if e.op in "+-":
            prec, right_min = _PREC_ADD, _PREC_ADD + 1
        elif e.op in "*/":
            prec, right_min = _PREC_MUL, _PREC_MUL + 1
        else:
            # right-associative; exponent slot admits unary minus
            prec, right_min = _PREC_POW, _PREC_NEG
        left_min = prec if e.op != "^" else _PREC_ATOM
        text = f"{_unparse(e.left, left_min)}{e.op}{_unparse(e.right, right_min)}"
    if prec < parent_prec:
        return f"({text})"
    return text
