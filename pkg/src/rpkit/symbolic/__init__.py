"""Closed-world expression kernel over jet coordinates (t, R, Rdot, Rddot)."""

from .expr import (
    P,
    P1,
    Const,
    Expr,
    Opaque,
    Param,
    Power,
    Product,
    R,
    Rddot,
    Rdot,
    Sum,
    Symbol,
    UnboundSymbolError,
    Var,
    as_rational,
    collect,
    constant_value,
    diff,
    evaluate,
    free_symbols,
    is_constant,
    is_zero,
    lambdify,
    monomials,
    normalize,
    render,
    substitute,
    substitute_many,
    t,
    total_derivative,
)
from .parser import ExprSyntaxError, UnknownSymbolError, parse

eval_expr = evaluate

__all__ = [
    "P", "P1", "Const", "Expr", "Opaque", "Param", "Power", "Product", "R",
    "Rddot", "Rdot", "Sum", "Symbol", "UnboundSymbolError", "Var", "as_rational",
    "collect", "constant_value", "diff", "evaluate", "eval_expr", "free_symbols",
    "is_constant", "is_zero", "lambdify", "monomials", "normalize", "render",
    "substitute", "substitute_many", "t", "total_derivative", "ExprSyntaxError",
    "UnknownSymbolError", "parse",
]
