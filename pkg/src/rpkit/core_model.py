"""The dimensionless Rayleigh-Plesset equation.

    R'' = p_n / R**(3k+1) - 3 R'**2 / (2R) - Re_inv R' / R**2 - We / R**2 - Th p(t) / R

``Re_inv = 0`` is the inviscid limit and ``We = 0`` drops surface tension;
no infinities are ever used.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Union

from .errors import DomainError, UnsupportedForcing
from .symbolic import (
    Const,
    Expr,
    Opaque,
    Param,
    Power,
    R,
    Rdot,
    Rddot,
    as_rational,
    normalize,
    t,
)

Number = Union[int, float, Fraction]


def _parse_number(x) -> Number:
    """JSON scalars: strings are exact rationals, ints stay exact, floats stay floats."""
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, bool):
        raise TypeError("expected a number")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (float, Fraction)):
        return x
    raise TypeError(f"expected a number, got {type(x).__name__}")


def _json_number(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    return x


# ---------------------------------------------------------------------------
# forcing

@dataclass(frozen=True)
class Constant:
    p0: Number

    def value(self, t: float) -> float:
        return float(self.p0)

    def derivative(self, t: float, order: int = 1) -> float:
        return float(self.p0) if order == 0 else 0.0

    def to_json(self) -> dict:
        return {"type": "constant", "p0": _json_number(self.p0)}


@dataclass(frozen=True)
class PowerLaw:
    """p(t) = c * (a*t + b)**e, defined where a*t + b > 0."""

    c: Number
    a: Number
    b: Number
    e: Number

    def _base(self, t):
        base = float(self.a) * t + float(self.b)
        if base <= 0:
            raise DomainError(f"power-law forcing needs a*t + b > 0 (got {base} at t={t})")
        return base

    def value(self, t: float) -> float:
        return float(self.c) * self._base(t) ** float(self.e)

    def derivative(self, t: float, order: int = 1) -> float:
        """The ``order``-th time derivative: c a^d e(e-1)...(e-d+1) (a t + b)^(e-d)."""
        base = self._base(t)
        e = float(self.e)
        falling = 1.0
        for i in range(order):
            falling *= e - i
        return float(self.c) * float(self.a) ** order * falling * base ** (e - order)

    def to_json(self) -> dict:
        return {"type": "power_law", **{k: _json_number(getattr(self, k)) for k in "cabe"}}


PressureForcing = Union[Constant, PowerLaw]


def make_forcing(f) -> PressureForcing:
    """Canonicalize: a power law with ``a = 0`` or ``c = 0`` is a constant."""
    if isinstance(f, Constant):
        return f
    if isinstance(f, PowerLaw):
        if f.c == 0:
            return Constant(f.c)
        if f.a == 0:
            if f.b <= 0:
                raise DomainError("power-law forcing with a = 0 needs b > 0")
            if all(isinstance(v, (int, Fraction)) for v in (f.c, f.b, f.e)):
                value = Const(f.c) * Power(Const(f.b), f.e)
                if isinstance(value, Const):
                    return Constant(value.value)
            return Constant(float(f.c) * float(f.b) ** float(f.e))
        return f
    raise TypeError(f"not a forcing: {f!r}")


def forcing_from_json(d: dict) -> PressureForcing:
    kind = d.get("type")
    if kind == "constant":
        return Constant(_parse_number(d["p0"]))
    if kind == "power_law":
        return make_forcing(PowerLaw(*(_parse_number(d[k]) for k in "cabe")))
    raise ValueError(f"unknown forcing type {kind!r}")


def pressure(f: PressureForcing, t: float) -> tuple[float, float]:
    """p(t) and dp/dt."""
    return f.value(t), f.derivative(t, 1)


# ---------------------------------------------------------------------------
# parameters

@dataclass(frozen=True)
class DimensionalParams:
    rho: float
    mu: float
    gamma: float
    p_g0: float
    r0: float
    omega: float
    p0_char: float
    k: Number = Fraction(1)

    def __post_init__(self):
        for name in ("rho", "r0", "omega", "p0_char"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive")
        for name in ("mu", "gamma", "p_g0"):
            if getattr(self, name) < 0:
                raise DomainError(f"{name} must be nonnegative")

    @classmethod
    def from_json(cls, d: dict) -> "DimensionalParams":
        keys = ("rho", "mu", "gamma", "p_g0", "r0", "omega", "p0_char")
        missing = [k for k in keys + ("k",) if k not in d]
        if missing:
            raise ValueError(f"missing keys: {', '.join(missing)}")
        return cls(*(float(_parse_number(d[k])) for k in keys), k=_parse_number(d["k"]))


@dataclass(frozen=True)
class RpeParams:
    re_inv: Number = 0
    we: Number = 0
    th: Number = 1
    p_n: Number = 0
    k: Number = Fraction(1)
    forcing: PressureForcing = field(default_factory=lambda: Constant(Fraction(1)))

    def __post_init__(self):
        if self.re_inv < 0 or self.we < 0 or self.p_n < 0:
            raise DomainError("re_inv, we and p_n must be nonnegative")
        if self.th < 0:
            raise DomainError("th must be nonnegative")
        object.__setattr__(self, "forcing", make_forcing(self.forcing))

    def with_forcing(self, forcing) -> "RpeParams":
        return replace(self, forcing=forcing)

    def replace(self, **changes) -> "RpeParams":
        return replace(self, **changes)

    @property
    def k_exact(self) -> Fraction:
        """k as an exact rational; symbolic paths refuse real-valued k."""
        if isinstance(self.k, float):
            raise TypeError("symbolic operations need an exact rational k (pass a Fraction or 'p/q')")
        return as_rational(self.k)

    @property
    def gas_exponent(self) -> float:
        return 3 * float(self.k) + 1

    @classmethod
    def from_json(cls, d: dict) -> "RpeParams":
        keys = ("re_inv", "we", "th", "p_n", "k", "forcing")
        extra = set(d) - set(keys)
        if extra:
            raise ValueError(f"unknown keys: {', '.join(sorted(extra))}")
        missing = [k for k in keys if k not in d]
        if missing:
            raise ValueError(f"missing keys: {', '.join(missing)}")
        return cls(
            re_inv=_parse_number(d["re_inv"]),
            we=_parse_number(d["we"]),
            th=_parse_number(d["th"]),
            p_n=_parse_number(d["p_n"]),
            k=_parse_number(d["k"]),
            forcing=forcing_from_json(d["forcing"]),
        )

    def to_json(self) -> dict:
        return {
            "re_inv": _json_number(self.re_inv),
            "we": _json_number(self.we),
            "th": _json_number(self.th),
            "p_n": _json_number(self.p_n),
            "k": _json_number(self.k),
            "forcing": self.forcing.to_json(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())


@dataclass(frozen=True)
class State:
    t: float
    r: float
    r_dot: float

    def __post_init__(self):
        if not self.r > 0:
            raise DomainError(f"radius must be positive, got {self.r}")


def nondimensionalize(d: DimensionalParams) -> RpeParams:
    """Map dimensional coefficients onto (Re_inv, We, Th, p_n).

    The gas number carries no R0**(3k) factor: with R* = R/R0 it cancels
    against the R**(3k+1) of the gas term.
    """
    scale = d.rho * d.r0 ** 2 * d.omega ** 2
    return RpeParams(
        re_inv=4 * d.mu / (d.rho * d.r0 ** 2 * d.omega),
        we=2 * d.gamma / (d.rho * d.r0 ** 3 * d.omega ** 2),
        th=d.p0_char / scale,
        p_n=d.p_g0 / scale,
        k=d.k,
        forcing=Constant(Fraction(1)),
    )


def rhs(p: RpeParams, s: State) -> float:
    """Acceleration f(t, R, R')."""
    r, v = s.r, s.r_dot
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    forcing = p.forcing.value(s.t)
    return (
        float(p.p_n) / r ** p.gas_exponent
        - 1.5 * v * v / r
        - float(p.re_inv) * v / (r * r)
        - float(p.we) / (r * r)
        - float(p.th) * forcing / r
    )


def residual(p: RpeParams, s: State, r_ddot: float) -> float:
    """R'' - f; zero exactly on the equation manifold."""
    return r_ddot - rhs(p, s)


# ---------------------------------------------------------------------------
# symbolic right-hand side

COEFF_SYMBOLS = {"re_inv": Param("Re_inv"), "we": Param("We"), "th": Param("Th"), "p_n": Param("p_n")}


def _coef(p: RpeParams, name: str, symbolic: bool) -> Expr:
    if symbolic:
        return COEFF_SYMBOLS[name]
    return Const(as_rational(getattr(p, name)))


def rhs_expr(p: RpeParams, symbolic: bool = False, forcing: str = "opaque") -> Expr:
    """f(t, R, Rdot) as an expression.

    ``symbolic=True`` keeps Re_inv, We, Th, p_n as parameters (k stays exact).
    ``forcing='opaque'`` leaves p(t) as the opaque symbol; ``'explicit'``
    writes out the constant or power law in t.
    """
    k = p.k_exact
    gas = _coef(p, "p_n", symbolic) * Power(R, -(3 * k + 1))
    f = (
        gas
        - Const(Fraction(3, 2)) * Rdot ** 2 / R
        - _coef(p, "re_inv", symbolic) * Rdot / R ** 2
        - _coef(p, "we", symbolic) / R ** 2
        - _coef(p, "th", symbolic) * forcing_expr(p.forcing, forcing) / R
    )
    return normalize(f)


def forcing_expr(f: PressureForcing, mode: str = "opaque") -> Expr:
    if mode == "opaque":
        return Opaque("p", 0)
    if mode != "explicit":
        raise ValueError(f"unknown forcing mode {mode!r}")
    if isinstance(f, Constant):
        return Const(as_rational(f.p0))
    if isinstance(f, PowerLaw):
        a, b, c, e = (as_rational(getattr(f, k)) for k in "abce")
        return Const(c) * Power(Const(a) * t + Const(b), e)
    raise UnsupportedForcing(f"cannot express {f!r}")


def residual_expr(p: RpeParams, symbolic: bool = False, forcing: str = "opaque") -> Expr:
    """F = Rddot - f(t, R, Rdot)."""
    return normalize(Rddot - rhs_expr(p, symbolic=symbolic, forcing=forcing))

