import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lrkm import fracops
from lrkm.exprlang import (
    END,
    BinOp,
    EvalError,
    Neg,
    Num,
    ParseError,
    UnknownIdentifierError,
    Var,
    evaluate,
    free_vars,
    parse,
    to_source,
)
from lrkm import exprlang


def test_precedence():
    assert parse("xi^2 + 1") == BinOp("+", BinOp("^", Var("xi"), Num("2")), Num("1"))
    assert parse("-z^2") == Neg(BinOp("^", Var("z"), Num("2")))
    assert parse("2^3^2") == BinOp("^", Num("2"), BinOp("^", Num("3"), Num("2")))
    assert parse("1 - 2 - 3") == BinOp("-", BinOp("-", Num("1"), Num("2")), Num("3"))


def test_unclosed_call():
    with pytest.raises(ParseError) as info:
        parse("sin(pi*xi")
    assert info.value.offset == len("sin(pi*xi")
    assert info.value.expected == {")"}
    assert END in str(info.value)


def test_trailing_garbage_and_bad_characters():
    with pytest.raises(ParseError) as info:
        parse("xi 2")
    assert info.value.offset == 3
    with pytest.raises(ParseError):
        parse("xi $ 2")
    with pytest.raises(ParseError):
        parse("")


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifierError) as info:
        parse("xi + foo")
    assert info.value.name == "foo" and info.value.offset == 5


@pytest.mark.parametrize(
    "src, args, want",
    [
        ("xi*(xi-1)", (0.5, 0, 0), -0.25),
        ("z*zp + xi", (0.5, 2, 3), 6.5),
        ("gamma(5)", (), 24),
        ("-2^2", (), -4),
        ("sqrt(xi) + abs(-1) + ln(e) + exp(0)", (0.25,), 3.5),
        ("sin(pi/2) + cos(0) + tan(0)", (), 2),
        ("(-8)^3", (), -512),
    ],
)
def test_evaluate(src, args, want):
    assert float(evaluate(parse(src), *args)) == pytest.approx(want, rel=1e-15)


def test_eval_alias():
    assert exprlang.eval is evaluate


def test_gamma_shared_with_fracops():
    for x in (0.5, 2.5, 7.25, 19.0):
        assert evaluate(parse("gamma(xi)"), x) == fracops.gamma(x)


@pytest.mark.parametrize(
    "src", ["1/0", "ln(0)", "ln(-1)", "sqrt(-1)", "gamma(0)", "gamma(-2)", "0^(-1)", "(-2)^0.5", "exp(100000)"]
)
def test_domain_errors(src):
    with pytest.raises(EvalError):
        evaluate(parse(src), 0.5)


def test_free_vars():
    assert free_vars(parse("xi+1")) == {"xi"}
    assert free_vars(parse("3.0")) == set()
    assert free_vars(parse("z*zp - xi^3")) == {"xi", "z", "zp"}
    assert free_vars(parse("sin(pi)")) == set()


atoms = st.sampled_from(["xi", "z", "zp", "pi", "2", "0.5", "1e-3"])


def build_expr(children):
    return st.one_of(
        st.tuples(children, st.sampled_from("+-*/^"), children).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        children.map(lambda c: f"-{c}"),
        st.tuples(st.sampled_from(["sin", "exp", "abs"]), children).map(lambda t: f"{t[0]}({t[1]})"),
    )


@settings(max_examples=150, deadline=None)
@given(st.recursive(atoms, build_expr, max_leaves=12))
def test_round_trip(src):
    tree = parse(src)
    assert parse(to_source(tree)) == tree
