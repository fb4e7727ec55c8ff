import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscfun.errors import ExprDomainError, ExprSyntaxError, UnknownIdentifierError
from oscfun.expr import (
    BinOp,
    Const,
    Func,
    Neg,
    Var,
    differentiate,
    evaluate,
    fold_constants,
    parse_expression,
    to_text,
)


def test_parse_er_form_vanishes_at_zero():
    ast = parse_expression("2*(1-exp(-x/2))")
    assert evaluate(ast, 0.0) == 0.0


def test_parse_variable():
    ast = parse_expression("x")
    assert ast == Var()
    assert evaluate(ast, 3.5) == 3.5


def test_syntax_error_reports_offset():
    with pytest.raises(ExprSyntaxError) as info:
        parse_expression("exp(")
    assert info.value.offset == 4
    assert "expected expression" in str(info.value)


@pytest.mark.parametrize(
    "text, offset",
    [("", 0), ("x +", 3), ("(x", 2), ("x)", 1), ("2 $ x", 2), ("exp x", 4), ("x x", 2)],
)
def test_syntax_error_offsets(text, offset):
    with pytest.raises(ExprSyntaxError) as info:
        parse_expression(text)
    assert info.value.offset == offset


def test_offset_is_in_bytes():
    # "é" is two bytes in UTF-8
    with pytest.raises(ExprSyntaxError) as info:
        parse_expression("x+é")
    assert info.value.offset == 2
    with pytest.raises(ExprSyntaxError) as info:
        parse_expression("ln(x) é")
    assert info.value.offset == 6


@pytest.mark.parametrize("text", ["y", "2*foo(x)", "pi*x", "exp2(x)"])
def test_unknown_identifier(text):
    with pytest.raises(UnknownIdentifierError):
        parse_expression(text)


def test_precedence_and_associativity():
    assert evaluate(parse_expression("1 + 2*3"), 0.0) == 7.0
    assert evaluate(parse_expression("8/4/2"), 0.0) == 1.0
    assert evaluate(parse_expression("2^3^2"), 0.0) == 512.0
    assert evaluate(parse_expression("10 - 4 - 3"), 0.0) == 3.0
    # unary minus is an atom, so it binds tighter than '^'
    assert evaluate(parse_expression("-x^2"), 3.0) == 9.0
    assert evaluate(parse_expression("-(x^2)"), 3.0) == -9.0


def test_numbers_with_exponents():
    assert evaluate(parse_expression("1.5e-3*x"), 2.0) == pytest.approx(3e-3)
    assert evaluate(parse_expression(".5 + 2."), 0.0) == 2.5


def test_vectorized_evaluation():
    xs = np.linspace(0.1, 3, 7)
    out = evaluate(parse_expression("sin(x)^2 + cos(x)^2"), xs)
    assert out.shape == xs.shape
    np.testing.assert_allclose(out, 1.0, rtol=1e-15)
    const = evaluate(parse_expression("3"), xs)
    np.testing.assert_array_equal(const, np.full(xs.shape, 3.0))


@pytest.mark.parametrize(
    "text, x, op",
    [("ln(x)", -1.0, "ln"), ("sqrt(x)", -2.0, "sqrt"), ("1/x", 0.0, "division"), ("x^0.5", -1.0, "power")],
)
def test_domain_errors_carry_input(text, x, op):
    with pytest.raises(ExprDomainError) as info:
        evaluate(parse_expression(text), x)
    assert info.value.value == x
    assert op in str(info.value)


def test_domain_error_reports_first_offending_array_entry():
    with pytest.raises(ExprDomainError) as info:
        evaluate(parse_expression("ln(x - 1)"), np.array([3.0, 2.0, 0.5, 0.2]))
    assert info.value.value == 0.5


def test_integer_powers_allow_negative_base():
    assert evaluate(parse_expression("x^3"), -2.0) == -8.0
    assert evaluate(parse_expression("x^-2"), -2.0) == 0.25


def test_derivative_of_er_form():
    d = differentiate(parse_expression("2*(1-exp(-x/2))"))
    assert evaluate(d, 1.0) == pytest.approx(math.exp(-0.5), rel=1e-15)
    assert evaluate(d, 1.0) == pytest.approx(0.606531, abs=5e-7)


def test_simple_derivatives():
    assert differentiate(parse_expression("x")) == Const(1.0)
    assert evaluate(differentiate(parse_expression("x^2")), 3.0) == 6.0
    assert differentiate(parse_expression("5")) == Const(0.0)


def test_derivative_stays_in_grammar():
    d = differentiate(parse_expression("x^x + ln(sqrt(x))/sin(x)"))
    again = parse_expression(to_text(d))
    xs = np.linspace(0.3, 3.0, 11)
    np.testing.assert_allclose(evaluate(again, xs), evaluate(d, xs), rtol=1e-14)


def _central(ast, x, h=1e-4):
    return (evaluate(ast, x + h) - evaluate(ast, x - h)) / (2 * h)


@pytest.mark.parametrize(
    "text",
    [
        "x",
        "2*(1-exp(-x/2))",
        "0.5*(x-0.5)*(x-1.5)",
        "sin(x)*cos(x/3)",
        "ln(1+x^2)",
        "sqrt(x)/(1+x)",
        "x^x/10^x",
        "x^2.5 - 3*x^-1",
        "exp(-x)*sin(2*x) + -x^3/100",
    ],
)
def test_derivative_matches_finite_differences(text):
    ast = parse_expression(text)
    d = differentiate(ast)
    xs = np.linspace(0.1, 20.0, 100)
    exact = evaluate(d, xs)
    fd = _central(ast, xs)
    assert np.all(np.abs(exact - fd) <= 1e-6 * (1 + np.abs(exact)))


def test_fold_constants_only_touches_literal_subtrees():
    ast = parse_expression("2*3 + x*(4-1)")
    folded = fold_constants(ast)
    assert folded == BinOp("+", Const(6.0), BinOp("*", Var(), Const(3.0)))
    # undefined literal subtrees are left alone rather than folded to nan
    assert fold_constants(parse_expression("ln(0-1) + x")).left == Func("ln", Const(-1.0))


# ---------------------------------------------------------------------------
# round trip: the printer's output parses back to the identical tree

_consts = st.floats(min_value=0, max_value=1e6, allow_nan=False).map(Const)
_leaves = st.one_of(_consts, st.just(Var()))


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.tuples(st.sampled_from("+-*/^"), children, children).map(lambda t: BinOp(*t)),
        st.tuples(st.sampled_from(["exp", "ln", "sin", "cos", "sqrt"]), children).map(lambda t: Func(*t)),
    )


parser_trees = st.recursive(_leaves, _extend, max_leaves=12)


@settings(max_examples=300, deadline=None)
@given(parser_trees)
def test_print_parse_round_trip(tree):
    assert parse_expression(to_text(tree)) == tree


@pytest.mark.parametrize(
    "text",
    ["-x^2", "-(x^2)", "(x^2)^3", "x^(2^3)", "x - (1 - x)", "x/(2*x)", "(x+1)*(x-1)", "--x", "x*-2", "2^-x^-1"],
)
def test_round_trip_examples(text):
    ast = parse_expression(text)
    assert parse_expression(to_text(ast)) == ast
