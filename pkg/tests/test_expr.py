import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spin2d import expr as ex
from spin2d.expr import BinOp, Call, ExprEvalError, ExprSyntaxError, Neg, Num, Var


def test_precedence_tree():
    e = ex.parse("x^2 + sin(y)")
    assert e == BinOp("+", BinOp("^", Var("x"), Num(2)), Call("sin", Var("y")))


def test_nested_tree():
    e = ex.parse("1/(1 + x^2 + y^2)")
    assert isinstance(e, BinOp) and e.op == "/"
    assert e.right == BinOp("+", BinOp("+", Num(1), BinOp("^", Var("x"), Num(2))), BinOp("^", Var("y"), Num(2)))


def test_power_is_right_associative():
    assert ex.evaluate(ex.parse("2^3^2"), 0, 0) == 512


def test_unary_minus_binds_looser_than_power():
    assert ex.parse("-x^2") == Neg(BinOp("^", Var("x"), Num(2)))
    assert ex.evaluate(ex.parse("-x^2"), 3, 0) == -9


def test_left_associativity():
    assert ex.evaluate(ex.parse("8 - 3 - 2"), 0, 0) == 3
    assert ex.evaluate(ex.parse("8 / 4 / 2"), 0, 0) == 1


def test_imaginary_literal():
    assert ex.evaluate(ex.parse("i*i"), 0, 0) == -1
    assert ex.evaluate(ex.parse("2*i + x"), 1, 0) == 1 + 2j


@pytest.mark.parametrize("src,offset", [("sin(x", 5), ("(x + 1", 6), ("", 0), ("x + q", 4), ("x + )", 4),
                                        ("x $ y", 2)])
def test_syntax_errors_carry_offset(src, offset):
    with pytest.raises(ExprSyntaxError) as info:
        ex.parse(src)
    assert info.value.offset == offset


def test_aliases():
    assert ex.parse("u + v", {"u": "x", "v": "y"}) == BinOp("+", Var("x"), Var("y"))


def test_xy_jet():
    j = ex.eval_jet(ex.parse("x*y"), (2, 3), 2)
    assert j.value == 6 and j.derivative(1, 0) == 3 and j.derivative(0, 1) == 2
    assert j.derivative(1, 1) == 1 and j.derivative(2, 0) == 0 and j.derivative(0, 2) == 0


def test_exp_jet():
    j = ex.eval_jet(ex.parse("exp(x)"), (0, 0), 3)
    assert np.allclose([j[k, 0] for k in range(4)], [1, 1, 0.5, 1 / 6])


def test_polynomial_exact():
    e = ex.parse("3*x^3*y - 2*x*y^2 + 7")
    j = ex.eval_jet(e, (0.5, -1.5), 4)
    assert j.derivative(3, 1) == 18
    assert j.derivative(1, 2) == -4
    assert j.derivative(2, 2) == 0


def test_eval_error_names_subexpression():
    with pytest.raises(ExprEvalError) as info:
        ex.eval_jet(ex.parse("1 + 1/(x - 1)"), (1, 0), 2)
    assert "x - 1" in str(info.value)
    with pytest.raises(ExprEvalError):
        ex.eval_jet(ex.parse("sqrt(y)"), (0.3, 0), 2)
    with pytest.raises(ExprEvalError):
        ex.eval_jet(ex.parse("ln(x*y)"), (0, 2), 2)


def test_non_integer_powers():
    j = ex.eval_jet(ex.parse("x^0.5"), (4, 0), 2)
    assert abs(j.value - 2) < 1e-15 and abs(j.derivative(1, 0) - 0.25) < 1e-15
    j = ex.eval_jet(ex.parse("x^y"), (2, 3), 2)
    assert abs(j.value - 8) < 1e-13 and abs(j.derivative(0, 1) - 8 * np.log(2)) < 1e-12


# random expression generation -------------------------------------------

SAFE_FUNCS = ("sin", "cos", "sinh", "cosh", "exp")


def random_expr(rng, depth=3):
    # only trees the parser can produce: literals are non-negative reals or i
    if depth == 0 or rng.random() < 0.25:
        r = rng.random()
        if r < 0.4:
            return Var("x" if rng.random() < 0.5 else "y")
        if r < 0.5:
            return Num(1j)
        return Num(complex(round(rng.uniform(0, 2), 2)))
    k = rng.integers(0, 6)
    if k == 0:
        return Neg(random_expr(rng, depth - 1))
    if k == 1:
        return Call(SAFE_FUNCS[rng.integers(len(SAFE_FUNCS))], random_expr(rng, depth - 1))
    if k == 2:
        # denominators bounded away from zero
        return BinOp("/", random_expr(rng, depth - 1), BinOp("+", Num(3 + 0j), Call("sin", random_expr(rng, depth - 1))))
    if k == 3:
        return BinOp("^", random_expr(rng, depth - 1), Num(complex(rng.integers(0, 4))))
    return BinOp(("+", "-", "*")[rng.integers(3)], random_expr(rng, depth - 1), random_expr(rng, depth - 1))


def test_random_expressions_match_finite_differences():
    rng = np.random.default_rng(5)
    h = 1e-4
    checked = 0
    while checked < 100:
        e = random_expr(rng)
        x0, y0 = rng.uniform(-0.8, 0.8, 2)
        f = lambda x, y: ex.evaluate(e, x, y)
        j = ex.eval_jet(e, (x0, y0), 2)
        scale = max(1.0, abs(j.value))
        if scale > 1e3:
            continue
        fx = (-f(x0 + 2 * h, y0) + 8 * f(x0 + h, y0) - 8 * f(x0 - h, y0) + f(x0 - 2 * h, y0)) / (12 * h)
        fy = (-f(x0, y0 + 2 * h) + 8 * f(x0, y0 + h) - 8 * f(x0, y0 - h) + f(x0, y0 - 2 * h)) / (12 * h)
        assert abs(j.value - f(x0, y0)) < 1e-12 * scale
        assert abs(j.derivative(1, 0) - fx) < 1e-7 * scale, ex.to_source(e)
        assert abs(j.derivative(0, 1) - fy) < 1e-7 * scale, ex.to_source(e)
        checked += 1


def test_round_trip_fixed():
    for src in ["-x^2", "(-x)^2", "2^3^2", "(2^3)^2", "x - (y - 1)", "x / (y * 2)", "-(x + y)", "x^-2",
                "2*i", "-i", "exp(-x) * sin(y)^2", "(1.5 + 2.0*i)*x", "x^(y + 1)"]:
        e = ex.parse(src)
        assert ex.parse(ex.to_source(e)) == e, src


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_random(seed):
    e = random_expr(np.random.default_rng(seed), depth=4)
    printed = ex.to_source(e)
    assert ex.parse(printed) == e
    assert ex.to_source(ex.parse(printed)) == printed


@settings(max_examples=100, deadline=None)
@given(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False))
def test_number_literals_round_trip(z):
    e = Num(complex(z))
    assert ex.evaluate(ex.parse(ex.to_source(e)), 0, 0) == complex(z)


def test_variables():
    assert ex.variables(ex.parse("sin(x) + 2")) == {"x"}
    assert ex.variables(ex.parse("3 - i")) == set()
