"""Expression grammar: evaluation, precedence, and error positions."""

import math

import numpy as np
import pytest

from driftgeo.errors import ParseError
from driftgeo.expr import parse


def ev(text, **env):
    return parse(text)(env)


def test_arithmetic_precedence():
    assert ev("1+2*3") == 7.0
    assert ev("(1+2)*3") == 9.0
    assert ev("7-4-2") == 1.0          # left associative
    assert ev("8/4/2") == 1.0
    assert ev("2^3^2") == 512.0        # right associative
    assert ev("-2^2") == -4.0          # unary minus binds looser than power
    assert ev("2*-3") == -6.0


def test_functions_and_constants():
    assert ev("sin(pi/2)") == pytest.approx(1.0)
    assert ev("exp(log(3))") == pytest.approx(3.0)
    assert ev("sqrt(2)^2") == pytest.approx(2.0)
    assert ev("cos(0)") == 1.0


def test_scientific_literals():
    assert ev("1e-3 + 2.5E2") == pytest.approx(0.001 + 250.0)
    assert ev(".5*4") == pytest.approx(2.0)


def test_variables_evaluate_on_arrays():
    x = np.linspace(0.0, 1.0, 7)
    y = np.linspace(-1.0, 1.0, 7)
    out = ev("x^2 + sin(y)/5", x=x, y=y)
    np.testing.assert_allclose(out, x**2 + np.sin(y) / 5)


def test_variables_collected():
    e = parse("a*cos(b) - pi")
    assert e.variables == {"a", "b"}


def test_missing_variable_reports_name():
    with pytest.raises(ParseError, match="unknown variable"):
        ev("x + zz", x=1.0)


def test_unknown_function_rejected():
    with pytest.raises(ParseError, match="unknown function"):
        parse("tan(1)")


def test_syntax_errors_carry_position():
    with pytest.raises(ParseError) as err:
        parse("1 + $")
    assert err.value.position == 4
    with pytest.raises(ParseError):
        parse("2*(3")
    with pytest.raises(ParseError, match="trailing"):
        parse("1 2")
    with pytest.raises(ParseError):
        parse("")
    with pytest.raises(ParseError):
        parse("   ")


def test_pi_is_scalar_not_variable():
    e = parse("pi")
    assert e.variables == frozenset()
    assert e({}) == math.pi


def test_environment_shadowing_is_not_allowed_for_pi():
    # pi resolves to the constant before the environment is consulted
    assert ev("pi", pi=3.0) == math.pi
