import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rpkit.core_model import RpeParams, rhs_expr
from rpkit.symbolic import (
    P,
    P1,
    Const,
    ExprSyntaxError,
    Opaque,
    Param,
    Power,
    R,
    Rddot,
    Rdot,
    UnboundSymbolError,
    UnknownSymbolError,
    Var,
    collect,
    diff,
    evaluate,
    free_symbols,
    is_zero,
    lambdify,
    normalize,
    parse,
    render,
    substitute,
    t,
    total_derivative,
)
from rpkit.symbolic.expr import Product, Sum
from rpkit.errors import DomainError

from corpus import BINDINGS, FORCING, VARIABLES, corpus, random_expr


# parsing

def test_parse_product_with_division():
    e = parse("Rdot^2 * 3/2 / R")
    assert e == normalize(Const(Fraction(3, 2)) * Rdot ** 2 * R ** -1)


def test_parse_opaque_forcing():
    assert parse("p(t)*Th/R") == normalize(Param("Th") * P / R)
    assert parse("p'(t)") == P1
    assert parse("p''(t)") == Opaque("p", 2)


def test_parse_binds_symbolic_exponent():
    assert parse("R^(3*k+1)", {"k": 1}) == normalize(R ** 4)


def test_unary_minus_binds_looser_than_power():
    assert parse("-R^2") == normalize(-(R ** 2))
    assert parse("R^-1") == normalize(R ** -1)


def test_rational_literals_are_exact():
    assert parse("0.1") == Const(Fraction(1, 10))
    assert parse("2/6") == Const(Fraction(1, 3))


@pytest.mark.parametrize("text,pos", [("R + * t", 4), ("(R + t", 6), ("R $ t", 2), ("", 0)])
def test_syntax_errors_carry_position(text, pos):
    with pytest.raises(ExprSyntaxError) as err:
        parse(text)
    assert err.value.pos == pos


def test_unknown_symbol():
    with pytest.raises(UnknownSymbolError):
        parse("R + zeta")
    assert parse("R + zeta", symbols=["zeta"]) == normalize(R + Param("zeta"))


# differentiation

def test_power_rule():
    assert diff(Power(R, Fraction(-3, 2)), R) == normalize(Const(Fraction(-3, 2)) * Power(R, Fraction(-5, 2)))


def test_opaque_time_derivative():
    assert diff(P, t) == P1
    assert diff(P, R) == Const(0)


def test_rhs_derivative_in_rdot():
    f = rhs_expr(RpeParams(), symbolic=True)
    expected = parse("-3*Rdot/R - Re_inv/R^2")
    assert diff(f, Rdot) == expected


def test_total_derivative_examples():
    assert total_derivative(R) == Rdot
    assert total_derivative(t * R) == normalize(R + t * Rdot)
    assert total_derivative(Rdot ** 2) == normalize(2 * Rdot * Rddot)
    with pytest.raises(ValueError):
        total_derivative(Rddot)


# substitution and collection

def test_substitute_examples():
    assert is_zero(substitute(Rddot + Rdot, Rddot, -Rdot))
    k = Param("k")
    e = Power(R, normalize(3 * k + 1))
    assert substitute(e, k, Const(Fraction(1, 3))) == normalize(R ** 2)
    f = substitute(P, P, Param("c") * Power(Param("a") * t + Param("b"), Fraction(-6, 5)))
    assert not any(isinstance(s, Opaque) for s in free_symbols(f))


def test_collect_examples():
    parts = collect(3 * Rdot ** 3 + t * Rdot, [Rdot])
    assert parts == {(1,): t, (3,): Const(3)}
    assert collect(Const(0), [R]) == {}


def test_collect_refuses_hidden_base():
    with pytest.raises(ValueError):
        collect(Power(R + t, Fraction(1, 2)), [R])


# evaluation

def test_eval_examples():
    assert evaluate(Power(R, Fraction(-5, 2)), {"R": 4}) == pytest.approx(1 / 32, rel=1e-15)
    p = RpeParams(th=1, p_n=1, k=1)
    assert evaluate(rhs_expr(p), {"t": 3.0, "R": 1.0, "Rdot": 0.0}, forcing=p.forcing) == 0.0


def test_eval_errors():
    with pytest.raises(UnboundSymbolError):
        evaluate(R + t, {"R": 1.0})
    with pytest.raises(DomainError):
        evaluate(Power(R, Fraction(1, 2)), {"R": -1.0})


def test_lambdify_matches_evaluate():
    e = corpus(5)[3]
    f = lambdify(e, ["t", "R", "Rdot", "Th", "We"], forcing=FORCING)
    assert f(*BINDINGS.values()) == pytest.approx(evaluate(e, BINDINGS, forcing=FORCING), rel=1e-13)


# properties

exprs = st.integers(0, 10_000).map(lambda s: random_expr(random.Random(s)))


@given(exprs)
def test_normalize_idempotent(e):
    n = normalize(e)
    assert normalize(n) == n


@given(st.integers(0, 10_000))
def test_normalize_ignores_term_order(seed):
    rng = random.Random(seed)
    e = random_expr(rng)
    terms = list(e.terms)
    rng.shuffle(terms)
    shuffled = [Product(tuple(reversed(x.factors))) for x in terms]
    assert normalize(Sum(tuple(shuffled))) == normalize(e)


@given(exprs)
def test_render_round_trip(e):
    n = normalize(e)
    assert parse(render(n)) == n


@given(exprs)
def test_mixed_partials_commute(e):
    assert diff(diff(e, t), R) == diff(diff(e, R), t)


@given(exprs, exprs, st.fractions(min_value=-5, max_value=5, max_denominator=7))
def test_diff_is_linear(e1, e2, a):
    lhs = diff(Const(a) * e1 + e2, R)
    assert lhs == normalize(Const(a) * diff(e1, R) + diff(e2, R))


@given(exprs, st.sampled_from(VARIABLES))
def test_diff_matches_central_differences(e, var):
    assert _fd_agrees(e, var)


def _fd_agrees(e, var, h=1e-6, rel=1e-6):
    exact = evaluate(diff(e, Var(var)), BINDINGS, forcing=FORCING)
    up = dict(BINDINGS, **{var: BINDINGS[var] + h})
    dn = dict(BINDINGS, **{var: BINDINGS[var] - h})
    fd = (evaluate(e, up, forcing=FORCING) - evaluate(e, dn, forcing=FORCING)) / (2 * h)
    scale = max(abs(exact), abs(evaluate(e, BINDINGS, forcing=FORCING)), 1.0)
    return math.isclose(fd, exact, rel_tol=rel, abs_tol=rel * scale)
