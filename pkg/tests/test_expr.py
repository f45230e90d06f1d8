import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tangentgeom import expr
from tangentgeom.errors import DomainError, ExprSyntaxError, UnknownSymbol

from helpers import fd_grad


def test_constant_literal():
    node = expr.parse("1", 2)
    assert expr.is_constant(node)
    assert expr.evaluate(node, np.zeros(2)) == 1.0


def test_polynomial_value():
    assert expr.evaluate(expr.parse("1 + 0.5*x1^2", 2), np.array([2.0, 0.0])) == 3.0


def test_unbalanced_paren_reports_end_of_input():
    with pytest.raises(ExprSyntaxError) as info:
        expr.parse("exp(x1", 2)
    assert info.value.position == len("exp(x1")


@pytest.mark.parametrize("text", ["x3", "y1", "tan(x1)", "x0"])
def test_unknown_symbols(text):
    with pytest.raises(UnknownSymbol):
        expr.parse(text, 2)


@pytest.mark.parametrize("text", ["", "1 +", "x1 x2", "2 ^ x1", "(1", "1)"])
def test_syntax_errors(text):
    with pytest.raises((ExprSyntaxError, UnknownSymbol)):
        expr.parse(text, 2)


@pytest.mark.parametrize("text, x", [("log(x1)", [-1.0, 0.0]), ("sqrt(x1)", [-0.5, 0.0]),
                                     ("1/x1", [0.0, 0.0]), ("x1^0.5", [-1.0, 0.0])])
def test_domain_errors(text, x):
    with pytest.raises(DomainError):
        expr.evaluate(expr.parse(text, 2), np.array(x))


@pytest.mark.parametrize("text, expected", [("-x1^2", -4.0), ("2^3^2", 512.0), ("8/2/2", 2.0),
                                            ("2-3-4", -5.0), ("-(x1+x2)", -5.0)])
def test_precedence_and_associativity(text, expected):
    assert expr.evaluate(expr.parse(text, 2), np.array([2.0, 3.0])) == pytest.approx(expected)


def test_jet_of_polynomial():
    j = expr.eval_jet(expr.parse("1+0.5*x1^2", 2), np.array([2.0, 0.0]))
    np.testing.assert_allclose(j.grad, [2.0, 0.0])


def test_jet_of_exponential_at_origin():
    j = expr.eval_jet(expr.parse("exp(x1)", 2), np.zeros(2))
    assert j.value == 1.0
    np.testing.assert_allclose(j.grad, [1.0, 0.0])
    assert j.hess[0, 0] == 1.0
    assert j.third[0, 0, 0] == 1.0


def _leaf():
    return st.sampled_from(["x1", "x2", "0.5", "1.5", "2"])


def _compound(children):
    binary = st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(
        lambda t: f"({t[0]} {t[1]} {t[2]})")
    unary = st.tuples(st.sampled_from(["sin", "cos", "exp"]), children).map(lambda t: f"{t[0]}({t[1]})")
    squared = children.map(lambda c: f"({c})^2")
    return binary | unary | squared


expressions = st.recursive(_leaf(), _compound, max_leaves=6)
points = st.tuples(st.floats(-0.8, 0.8), st.floats(-0.8, 0.8)).map(np.array)


@given(expressions, points)
def test_gradient_matches_finite_differences(text, x):
    node = expr.parse(text, 2)
    j = expr.eval_jet(node, x)
    fd = fd_grad(lambda y: expr.evaluate(node, y), x, 1e-4)
    assert np.all(np.abs(j.grad - fd) <= 1e-6 * (1 + np.abs(fd)))


@given(expressions, points)
def test_hessian_matches_finite_differences(text, x):
    node = expr.parse(text, 2)
    j = expr.eval_jet(node, x)
    fd = fd_grad(lambda y: expr.eval_jet(node, y, 1).grad, x, 1e-3)
    assert np.all(np.abs(j.hess - fd) <= 1e-4 * (1 + np.abs(fd)))


@given(expressions, points)
def test_third_derivative_matches_finite_differences(text, x):
    node = expr.parse(text, 2)
    j = expr.eval_jet(node, x)
    fd = fd_grad(lambda y: expr.eval_jet(node, y, 2).hess, x, 1e-3)
    assert np.all(np.abs(j.third - fd) <= 1e-4 * (1 + np.abs(fd)))


@given(expressions)
def test_print_parse_round_trip(text):
    node = expr.parse(text, 2)
    assert expr.parse(expr.to_string(node), 2) == node


def test_scientific_notation_and_functions():
    node = expr.parse("1e-1 * sqrt(x1) + log(x2)", 2)
    assert expr.evaluate(node, np.array([4.0, math.e])) == pytest.approx(1.2)
