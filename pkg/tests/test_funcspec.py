from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracmat.errors import (
    EvalDomainError,
    InversionFailure,
    NonMonotoneSamples,
    OutOfRange,
    ParseError,
    UnknownCatalogEntry,
)
from fracmat.funcspec import (
    BinOp,
    Call,
    FunctionSpec,
    Neg,
    Num,
    Var,
    catalog,
    derivative,
    differentiate,
    evaluate,
    invert_monotone,
    parse,
    to_string,
)

# {{{ parsing and evaluation


@pytest.mark.parametrize(
    ("src", "x", "value"),
    [
        ("x^2", 3.0, 9.0),
        ("-x^0.5", 4.0, -2.0),
        ("exp(x)*sin(x)", 0.0, 0.0),
        ("2^3^2", 0.0, 512.0),
        ("1 - 2 - 3", 0.0, -4.0),
        ("8 / 4 / 2", 0.0, 1.0),
        ("-2^2", 0.0, -4.0),
        ("(-2)^2", 0.0, 4.0),
        ("x^-1", 4.0, 0.25),
        ("pow(x, 3)", 2.0, 8.0),
        ("abs(x - 3)", 1.0, 2.0),
        ("  sqrt ( x )+log(x) ", 1.0, 1.0),
        ("1.5e1 * x", 2.0, 30.0),
        ("cos(0)", 7.0, 1.0),
    ],
)
def test_parse_and_evaluate(src, x, value):
    assert evaluate(parse(src), x) == pytest.approx(value, rel=1e-15)


def test_structure():
    assert parse("-x^0.5") == Neg(BinOp("^", Var(), Num(0.5)))
    assert parse("2^3^2") == BinOp("^", Num(2.0), BinOp("^", Num(3.0), Num(2.0)))
    assert parse("1-2-3") == BinOp("-", BinOp("-", Num(1.0), Num(2.0)), Num(3.0))


@pytest.mark.parametrize(
    ("src", "offset"),
    [
        ("", 0),
        ("x +", 3),
        ("2 * * x", 4),
        ("sin x", 4),
        ("foo(x)", 0),
        ("(x", 2),
        ("x)", 1),
        ("x $ 2", 2),
        ("pow(x)", 5),
        ("y", 0),
        ("--x", 1),
    ],
)
def test_parse_errors(src, offset):
    with pytest.raises(ParseError) as info:
        parse(src)
    assert info.value.offset == offset
    assert f"offset {offset}" in str(info.value)


def test_parse_error_lists_expected_tokens():
    with pytest.raises(ParseError) as info:
        parse("x +")
    assert "number" in info.value.expected and "'x'" in info.value.expected
    with pytest.raises(ParseError) as info:
        parse("pow(x)")
    assert info.value.expected == ("','",)
    with pytest.raises(ParseError) as info:
        parse("sin(x, 2)")
    assert info.value.offset == 5 and info.value.expected == ("')'",)


@pytest.mark.parametrize(
    ("src", "x"),
    [("log(x)", 0.0), ("log(x)", -1.0), ("sqrt(x)", -1e-3), ("1/x", 0.0), ("x^0.5", -4.0), ("exp(x)", 1e4)],
)
def test_domain_errors(src, x):
    with pytest.raises(EvalDomainError):
        evaluate(parse(src), x)


def test_integer_power_of_negative_is_defined():
    assert evaluate(parse("x^3"), -2.0) == -8.0
    np.testing.assert_array_equal(evaluate(parse("x^2 + 1"), np.array([0.0, 1.0, 2.0])), [1, 2, 5])


# }}}


# {{{ round trip

CORPUS = [
    "x", "2", "0.5", "1e-05", "x+1", "x-1", "1-x", "-x", "-x^2", "(-x)^2",
    "x^2^3", "(x^2)^3", "x^-2", "x^(-2)", "2*x+3", "2*(x+3)", "x/2/3", "x/(2/3)",
    "x-(1-x)", "x-(1+x)", "-(x+1)", "-(x*2)", "-(-x)",
    "exp(x)", "exp(-x)", "log(1+x)", "sqrt(x)*sqrt(x)", "sin(x)^2+cos(x)^2",
    "abs(x-0.5)", "pow(x, 2.5)", "pow(1+x, -1)", "exp(x)*sin(3*x)", "x^0.5+x^1.5",
    "1/(1+x^2)", "(x+1)/(x-1)", "x*x*x", "x*(x*x)", "(x*x)*x", "-x*2", "-(x)^2",
    "2^x", "2^-x", "exp(exp(x))", "log(log(x+3))", "x^x", "(1+x)^(1/3)",
    "sin(x)/x", "cos(pow(x, 2))", "0.1*x-0.2*x^2+0.3*x^3", "-1.25e+20*x",
]


@pytest.mark.parametrize("src", CORPUS)
def test_corpus_round_trip(src):
    tree = parse(src)
    text = to_string(tree)
    assert parse(text) == tree
    assert to_string(parse(text)) == text


def test_corpus_size():
    assert len(CORPUS) == 50


literals = st.floats(0, 1e6, allow_nan=False, allow_infinity=False).map(Num)
leaves = st.one_of(st.just(Var()), literals)


def _extend(children):
    return st.one_of(
        children.map(Neg),
        st.builds(BinOp, st.sampled_from(["+", "-", "*", "/", "^"]), children, children),
        st.builds(lambda f, a: Call(f, (a,)), st.sampled_from(["exp", "log", "sqrt", "sin", "cos", "abs"]), children),
        st.builds(lambda a, b: Call("pow", (a, b)), children, children),
    )


trees = st.recursive(leaves, _extend, max_leaves=12)


@given(trees)
def test_generated_round_trip(tree):
    assert parse(to_string(tree)) == tree


@given(trees)
def test_derivatives_round_trip(tree):
    # differentiation may create negative literals; they must print safely
    d = differentiate(tree)
    assert parse(to_string(d)) == d or evaluate_same(parse(to_string(d)), d)


def evaluate_same(t1, t2) -> bool:
    xs = np.linspace(0.3, 2.0, 7)
    try:
        return np.allclose(evaluate(t1, xs), evaluate(t2, xs), rtol=1e-12, equal_nan=True)
    except EvalDomainError:
        return True


# }}}


# {{{ derivatives


def test_derivative_examples():
    assert derivative(FunctionSpec.from_string("x^2", 0, 5), 3.0) == 6.0
    g = catalog("neg-power-beta", beta=2.0)
    for x in (0.5, 1.0, 3.0):
        assert g.derivative(x) == pytest.approx(-2 * x, rel=1e-15)
    assert FunctionSpec.from_string("exp(x)", -1, 1).derivative(0.0) == 1.0


@pytest.mark.parametrize(
    "src",
    ["x^3 - 2*x", "sin(x)*exp(-x)", "log(1+x^2)", "sqrt(x+1)/(x+2)", "pow(x, 2.5)", "x^x", "abs(x-3)", "cos(x)^2"],
)
def test_symbolic_matches_numeric(src):
    spec = FunctionSpec.from_string(src, 0.5, 2.5)
    for x in np.linspace(0.6, 2.4, 15):
        h = 1e-6 * max(1.0, abs(x))
        num = (spec(x + h) - spec(x - h)) / (2 * h)
        assert spec.derivative(x) == pytest.approx(num, rel=1e-6, abs=1e-8)


CATALOG = [
    ("power-beta", {"beta": 0.5}, (0.1, 10.0)),
    ("power-beta", {"beta": 2.0}, (0.1, 10.0)),
    ("neg-power-beta", {"beta": 2.0}, (0.1, 10.0)),
    ("neg-power-beta", {"beta": 0.5}, (0.1, 10.0)),
    ("identity", {}, (0.0, 1.0)),
    ("monomial", {"p": 3.0}, (0.05, 1.0)),
    ("expfun", {}, (0.0, 1.0)),
]


@pytest.mark.parametrize(("name", "params", "span"), CATALOG)
def test_catalog_derivative_agreement(name, params, span):
    g = catalog(name, **params)
    rng = np.random.default_rng(42)
    for x in rng.uniform(*span, 100):
        h = 1e-6 * max(1.0, abs(x))
        num = (g(x + h) - g(x - h)) / (2 * h)
        d = g.derivative(x)
        assert abs(d - num) <= 1e-6 * abs(d)


@pytest.mark.parametrize(("name", "params", "span"), CATALOG)
def test_catalog_inverse(name, params, span):
    g = catalog(name, **params)
    for x in np.linspace(*span, 9):
        assert invert_monotone(g, g(x)) == pytest.approx(x, rel=1e-12, abs=1e-14)


def test_catalog_examples():
    g = catalog("power-beta", beta=0.5)
    assert g.inverse(3.0) == 9.0
    assert g.derivative(4.0) == pytest.approx(0.25, rel=1e-15)
    assert catalog("identity")(0.3) == 0.3
    with pytest.raises(UnknownCatalogEntry):
        catalog("nope")
    with pytest.raises(ValueError):
        catalog("power-beta", beta=-1.0)


# }}}


# {{{ monotonicity and inversion


def test_monotonicity_screen():
    assert FunctionSpec.from_string("x^3", -1, 1).monotonicity() == "increasing"
    assert FunctionSpec.from_string("-x", 0, 1).monotonicity() == "decreasing"
    assert FunctionSpec.from_string("sin(x)", 0, 6).monotonicity() == "none"
    assert FunctionSpec.from_string("log(x)", 0, 1).monotonicity() == "increasing"
    g = FunctionSpec.from_string("x^1.5", 0, 2)
    xs = np.linspace(0, 2, 1024)
    assert np.all(np.diff(g(xs)) > 0)


@pytest.mark.parametrize(
    ("src", "a", "b", "y", "x"),
    [("x", 0, 1, 0.7, 0.7), ("x^3", 0, 2, 8.0, 2.0), ("x^0.5", 0, 4, 1.5, 2.25), ("-x^2", 0, 3, -4.0, 2.0)],
)
def test_inversion_examples(src, a, b, y, x):
    g = FunctionSpec.from_string(src, a, b)
    assert invert_monotone(g, y) == pytest.approx(x, rel=1e-12)


def test_inversion_unbounded_interval():
    g = FunctionSpec.from_string("x + x^2", 0, math.inf)
    assert invert_monotone(g, 110.0) == pytest.approx(10.0, rel=1e-13)


def test_inversion_errors():
    g = FunctionSpec.from_string("x^2", 0, 2)
    with pytest.raises(OutOfRange):
        invert_monotone(g, 5.0)
    with pytest.raises(OutOfRange):
        invert_monotone(g, -0.1)
    with pytest.raises(NonMonotoneSamples):
        invert_monotone(FunctionSpec.from_string("cos(x)", 0, 7), 0.5)
    # a residual bound below rounding cannot be met
    with pytest.raises(InversionFailure):
        invert_monotone(FunctionSpec.from_string("x^3", 0, 2), 3.0, tol=1e-30)


@given(st.floats(0.0, 1.0), st.sampled_from(["x^1.5", "exp(x) - 1", "x + sin(x)", "log(1 + x)"]))
def test_inversion_property(x, src):
    g = FunctionSpec.from_string(src, 0, 1)
    y = g(x)
    xs = invert_monotone(g, y)
    assert abs(g(xs) - y) <= 1e-12 * (1 + abs(y))


def test_shifted_spec():
    g = catalog("power-beta", beta=2.0, b=3.0)
    s = g.shifted(1.0)
    assert s(2.0) == 3.0
    assert s.derivative(2.0) == 4.0
    assert invert_monotone(s, 3.0) == 2.0


# }}}
