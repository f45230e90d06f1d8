"""Scalar field expressions f(x1, ..., xm).

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = ("-" | "+") unary | power ;
    power   = atom [ "^" unary ] ;            (* right-associative *)
    atom    = number | variable | func "(" expr ")" | "(" expr ")" ;
    func    = "exp" | "log" | "sin" | "cos" | "sqrt" ;
    variable= "x" digit { digit } ;           (* x1 .. xm *)
    number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;

Precedence is ``^`` > unary minus > ``* /`` > ``+ -``, so ``-x1^2`` is
``-(x1^2)``.  The exponent of ``^`` must be a constant sub-expression.
"""

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import jets
from .errors import DomainError, ExprSyntaxError, UnknownSymbol

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # 0-based; prints as x{index+1}


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Expr"


Expr = Union[Num, Var, Neg, BinOp, Call]

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(pos, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, m):
        self.text = text
        self.m = m
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def take(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, value):
        kind, text, pos = self.tok
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(pos, f"expected {value!r}, found {found}")
        self.take()

    def parse(self):
        if self.tok[0] == "end":
            raise ExprSyntaxError(0, "empty expression")
        node = self.expr()
        kind, text, pos = self.tok
        if kind != "end":
            raise ExprSyntaxError(pos, f"unexpected {text!r}")
        return node

    def expr(self):
        node = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok[1] in ("*", "/") and self.tok[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.tok[0] == "op" and self.tok[1] == "-":
            self.take()
            return Neg(self.unary())
        if self.tok[0] == "op" and self.tok[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.take()
            pos = self.tok[2]
            exponent = self.unary()
            if not is_constant(exponent):
                raise ExprSyntaxError(pos, "exponent of '^' must be constant")
            return BinOp("^", base, exponent)
        return base

    def atom(self):
        kind, text, pos = self.tok
        if kind == "num":
            self.take()
            val = float(text)
            if not math.isfinite(val):
                raise ExprSyntaxError(pos, f"literal {text} overflows a double")
            return Num(val)
        if kind == "name":
            self.take()
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(text, arg)
            m = re.fullmatch(r"x([1-9]\d*)", text)
            if m is None:
                raise UnknownSymbol(f"unknown identifier {text!r} at position {pos}")
            index = int(m.group(1))
            if index > self.m:
                raise UnknownSymbol(f"variable {text} exceeds dimension {self.m} (position {pos})")
            return Var(index - 1)
        if kind == "op" and text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(pos, f"expected a number, variable, function or '(', found {found}")


def parse(text, m):
    """Parse ``text`` into an immutable expression tree over variables x1..x{m}."""
    if not isinstance(text, str) or not text.strip():
        raise ExprSyntaxError(0, "empty expression")
    return _Parser(text, m).parse()


def is_constant(node):
    if isinstance(node, Num):
        return True
    if isinstance(node, Var):
        return False
    if isinstance(node, Neg):
        return is_constant(node.operand)
    if isinstance(node, BinOp):
        return is_constant(node.left) and is_constant(node.right)
    return is_constant(node.arg)


def max_variable(node):
    """Largest 1-based variable index used, 0 for constant expressions."""
    if isinstance(node, Var):
        return node.index + 1
    if isinstance(node, Num):
        return 0
    if isinstance(node, Neg):
        return max_variable(node.operand)
    if isinstance(node, BinOp):
        return max(max_variable(node.left), max_variable(node.right))
    return max_variable(node.arg)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def to_string(node):
    """Render an expression so that ``parse(to_string(e))`` rebuilds ``e``."""
    return _render(node, 0)


def _render(node, parent):
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return f"x{node.index + 1}"
    if isinstance(node, Call):
        return f"{node.name}({_render(node.arg, 0)})"
    if isinstance(node, Neg):
        s = "-" + _render(node.operand, _PREC["neg"])
        prec = _PREC["neg"]
    else:
        prec = _PREC[node.op]
        if node.op == "^":
            # base binds tighter than the operator; exponent is a unary slot
            s = f"{_render(node.left, prec + 1)}^{_render(node.right, _PREC['neg'])}"
        else:
            # left-associative: the right operand of equal precedence needs parens
            s = f"{_render(node.left, prec)} {node.op} {_render(node.right, prec + 1)}"
    return f"({s})" if prec < parent else s


_CALLS = {"exp": jets.exp, "log": jets.log, "sin": jets.sin, "cos": jets.cos, "sqrt": jets.sqrt}


def evaluate_with(node, env):
    """Evaluate with ``env[i]`` bound to variable x{i+1}; entries may be floats or jets."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return env[node.index]
    if isinstance(node, Neg):
        return -evaluate_with(node.operand, env)
    if isinstance(node, Call):
        return _CALLS[node.name](evaluate_with(node.arg, env))
    left = evaluate_with(node.left, env)
    if node.op == "^":
        return jets.power(left, evaluate_with(node.right, ()))
    right = evaluate_with(node.right, env)
    if node.op == "+":
        return left + right
    if node.op == "-":
        return left - right
    if node.op == "*":
        return left * right
    if isinstance(right, jets.Jet):
        return left / right
    if right == 0.0:
        raise DomainError("division by zero")
    return left / right


def evaluate(node, x):
    """Float value of the expression at the point ``x``."""
    out = evaluate_with(node, [float(v) for v in x])
    out = float(out)
    if not math.isfinite(out):
        raise DomainError(f"expression is not finite at {list(x)}")
    return out


def eval_jet(node, x, order=jets.MAX_ORDER):
    """Value and derivatives (to ``order``) of the expression at ``x``."""
    x = np.asarray(x, dtype=float)
    if max_variable(node) > x.shape[0]:
        raise UnknownSymbol(f"expression uses x{max_variable(node)} but the point has {x.shape[0]} coordinates")
    var = jets.Jet.variables(x, order)
    env = [var[i] for i in range(x.shape[0])]
    out = evaluate_with(node, env)
    out = jets.as_jet(out, x.shape[0], order)
    if not all(np.all(np.isfinite(ck)) for ck in out.c):
        raise DomainError(f"expression derivatives are not finite at {x.tolist()}")
    return out
