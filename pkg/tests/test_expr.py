import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hybridfrac import expr as ex
from hybridfrac.expr import BinOp, Call, Neg, Num, Var, evaluate, parse, to_source

EX1_F = "(1/4)*((1+abs(x))^(1/4) + (1+abs(y))^(1/4))"
EX1_G = "(1/3)*((1+abs(x))^(1/3) + (1+abs(y))^(1/3))"


def ev(src, **env):
    return evaluate(parse(src, set(env) | {"t", "x", "y"}), env)


def test_single_variable():
    assert parse("t", {"t"}) == Var("t")


def test_example_f_parses():
    e = parse(EX1_F, ex.F_VARS)
    assert ex.variables(e) == {"x", "y"}
    assert isinstance(e, BinOp) and e.op == "*"


@pytest.mark.parametrize("src", ["2*^x", "1+", "(1", "1)", "sin x", "x y", "3 $ 4", "1e"])
def test_syntax_errors(src):
    with pytest.raises(ex.ExprSyntaxError):
        parse(src, {"x"})


def test_syntax_error_reports_position():
    with pytest.raises(ex.ExprSyntaxError) as info:
        parse("2*^x", {"x"})
    assert info.value.position == 2


def test_empty_source():
    with pytest.raises(ex.ExprSyntaxError):
        parse("   ", {"x"})


def test_unknown_identifier():
    with pytest.raises(ex.UnknownIdentifierError):
        parse("x + z", {"x"})
    with pytest.raises(ex.UnknownIdentifierError):
        parse("x", {"t"})
    with pytest.raises(ex.UnknownIdentifierError):
        parse("gamma(x)", {"x"})


@pytest.mark.parametrize("src", ["min(x)", "pow(x)", "sin(x, x)", "abs(x, 1, 2)", "sqrt"])
def test_arity(src):
    with pytest.raises(ex.ArityError):
        parse(src, {"x"})


def test_atan():
    assert ev("atan(t)", t=1.0) == pytest.approx(math.pi / 4, abs=1e-15)
    assert ev("atan(t)", t=1.0) == pytest.approx(0.78539816, abs=1e-8)


def test_fourth_root_identity():
    assert ev("(1+abs(x))^(1/4)", x=0.0) == 1.0


def test_example_g_at_origin():
    assert ev(EX1_G, t=0.0, x=0.0, y=0.0) == pytest.approx(2 / 3, rel=1e-15)


def test_precedence():
    assert ev("2+3*4") == 14
    assert ev("2^3^2") == 512
    assert ev("-2^2") == -4
    assert ev("(-2)^2") == 4
    assert ev("2*-3") == -6
    assert ev("2^-1") == 0.5
    assert ev("8/4/2") == 1
    assert ev("1-2-3") == -4


def test_functions():
    assert ev("cbrt(-8)") == pytest.approx(-2.0)
    assert ev("sqrt(x)", x=9.0) == 3.0
    assert ev("ln(exp(2))") == pytest.approx(2.0)
    assert ev("min(x, y) + max(x, y)", x=1.0, y=5.0) == 6.0
    assert ev("pow(2, 10)") == 1024
    assert ev("sin(0) + cos(0)") == 1.0


def test_scientific_literals():
    assert ev("1.5e-3*1e3") == pytest.approx(1.5)
    assert ev(".5 + 2.") == 2.5


@pytest.mark.parametrize(
    "src, env",
    [
        ("sqrt(x)", {"x": -1.0}),
        ("ln(x)", {"x": 0.0}),
        ("x^0.5", {"x": -2.0}),
        ("x^(-1)", {"x": 0.0}),
        ("pow(x, 1/3)", {"x": -8.0}),
        ("1/x", {"x": 0.0}),
        ("exp(x)", {"x": 1e6}),
    ],
)
def test_domain_errors(src, env):
    with pytest.raises(ex.ExprDomainError):
        evaluate(parse(src, set(env)), env)


def test_negative_base_integer_exponent_is_fine():
    assert ev("x^3", x=-2.0) == -8.0


def test_domain_error_index_on_arrays():
    with pytest.raises(ex.ExprDomainError) as info:
        evaluate(parse("sqrt(x)", {"x"}), {"x": np.array([1.0, 4.0, -1.0, -2.0])})
    assert info.value.index == 2


def test_missing_binding():
    with pytest.raises(ex.ExprError):
        evaluate(parse("x + y"), {"x": 1.0})


def test_vectorized_matches_scalar():
    e = parse(EX1_F)
    xs = np.linspace(-2, 2, 11)
    vec = evaluate(e, {"t": 0.0, "x": xs, "y": xs[::-1]})
    sca = [evaluate(e, {"t": 0.0, "x": a, "y": b}) for a, b in zip(xs, xs[::-1])]
    np.testing.assert_array_equal(vec, sca)


# --------------------------------------------------------------- properties

_names = st.sampled_from(["t", "x", "y"])
_lits = st.floats(min_value=0, max_value=1e6, allow_nan=False, allow_infinity=False)
_unary = [f for f, n in ex.FUNCTIONS.items() if n == 1]
_binary = [f for f, n in ex.FUNCTIONS.items() if n == 2]

trees = st.recursive(
    st.one_of(_lits.map(Num), _names.map(Var)),
    lambda kids: st.one_of(
        kids.map(Neg),
        st.tuples(st.sampled_from("+-*/^"), kids, kids).map(lambda a: BinOp(*a)),
        st.tuples(st.sampled_from(_unary), kids).map(lambda a: Call(a[0], (a[1],))),
        st.tuples(st.sampled_from(_binary), kids, kids).map(lambda a: Call(a[0], (a[1], a[2]))),
    ),
    max_leaves=25,
)


@given(trees)
def test_print_parse_roundtrip(tree):
    assert parse(to_source(tree), ex.F_VARS) == tree


finite = st.floats(min_value=-1e150, max_value=1e150, allow_nan=False)


@given(finite, finite)
def test_addition_commutes(a, b):
    env = {"x": a, "y": b}
    assert evaluate(parse("x+y"), env) == evaluate(parse("y+x"), env)
