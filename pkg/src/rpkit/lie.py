"""Lie point symmetries of the bubble equation.

Symmetry condition on the equation manifold, determining equations from a
polynomial ansatz, exact null-space solving and numeric checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._exact import nullspace
from .core_model import Constant, PowerLaw, RpeParams, rhs_expr
from .errors import DomainError, UnsupportedForcing
from .symbolic import (
    P,
    P1,
    Const,
    Expr,
    Opaque,
    Param,
    Power,
    R,
    Rddot,
    Rdot,
    Var,
    as_rational,
    collect,
    constant_value,
    diff,
    free_symbols,
    is_constant,
    is_zero,
    lambdify,
    monomials,
    normalize,
    parse,
    render,
    substitute,
    substitute_many,
    t,
    total_derivative,
)

S = Var("s")
X = Var("x")
Y = Var("y")
DYDX = Var("dydx")
MAX_DEGREE = 4


@dataclass(frozen=True)
class VectorField:
    """xi d/dt + eta d/dR with components depending on (t, R) only."""

    xi: Expr
    eta: Expr

    def __post_init__(self):
        xi, eta = normalize(self.xi), normalize(self.eta)
        for comp in (xi, eta):
            bad = {s for s in free_symbols(comp) if isinstance(s, Opaque) or s in (Rdot, Rddot, S)}
            if bad:
                raise ValueError(f"point symmetry components must depend on (t, R) only, found {sorted(map(render, bad))}")
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "eta", eta)

    @classmethod
    def parse(cls, xi: str, eta: str) -> "VectorField":
        return cls(parse(xi), parse(eta))

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(self.xi + other.xi, self.eta + other.eta)

    def scale(self, a) -> "VectorField":
        a = Const(as_rational(a))
        return VectorField(a * self.xi, a * self.eta)

    def to_json(self) -> dict:
        return {"xi": render(self.xi), "eta": render(self.eta)}

    def __str__(self):
        return f"({render(self.xi)}) d/dt + ({render(self.eta)}) d/dR"


@dataclass(frozen=True)
class Prolonged:
    vf: VectorField
    eta1: Expr
    eta2: Expr


def prolong2(vf: VectorField) -> Prolonged:
    """eta' = D eta - Rdot D xi, eta'' = D eta' - Rddot D xi."""
    dxi = total_derivative(vf.xi)
    eta1 = normalize(total_derivative(vf.eta) - Rdot * dxi)
    eta2 = normalize(total_derivative(eta1) - Rddot * dxi)
    return Prolonged(vf, eta1, eta2)


def lambda_prolong(vf: VectorField, lam, variant: str = "printed") -> Prolonged:
    """Prolongation twisted by lambda(t, R, Rdot).

    ``variant='printed'`` adds lambda (eta' - Rdot xi) in the second line;
    ``'alternate'`` uses lambda (eta' - Rddot xi) for comparison.
    """
    lam = normalize(lam)
    if Rddot in free_symbols(lam):
        raise ValueError("lambda must not depend on Rddot")
    dxi = total_derivative(vf.xi)
    eta1 = normalize(total_derivative(vf.eta) - Rdot * dxi + lam * (vf.eta - Rdot * vf.xi))
    if variant == "printed":
        twist = eta1 - Rdot * vf.xi
    elif variant == "alternate":
        twist = eta1 - Rddot * vf.xi
    else:
        raise ValueError(f"unknown variant {variant!r}")
    eta2 = normalize(total_derivative(eta1) - Rddot * dxi + lam * twist)
    return Prolonged(vf, eta1, eta2)


# ---------------------------------------------------------------------------
# symmetry condition

def _raw_condition(p: RpeParams, vf: VectorField, symbolic: bool = False) -> Expr:
    """X2(Rddot - f) restricted to Rddot = f, with p(t) left opaque."""
    f = rhs_expr(p, symbolic=symbolic, forcing="opaque")
    pr = prolong2(vf)
    cond = pr.eta2 - vf.xi * diff(f, t) - vf.eta * diff(f, R) - pr.eta1 * diff(f, Rdot)
    return substitute(cond, Rddot, f)


def _power_law_subs(f: PowerLaw):
    """Maps putting t and p, p' in terms of s = a t + b."""
    a, b, c, e = (as_rational(getattr(f, k)) for k in "abce")
    return {
        t: (S - Const(b)) / Const(a),
        P: Const(c) * Power(S, e),
        P1: Const(c * e * a) * Power(S, e - 1),
    }


def _explicit(cond: Expr, forcing, in_s: bool) -> Expr:
    if isinstance(forcing, Constant):
        return substitute_many(cond, {P: Const(as_rational(forcing.p0)), P1: Const(0)})
    if isinstance(forcing, PowerLaw):
        e = substitute_many(cond, _power_law_subs(forcing))
        if in_s:
            return e
        a, b = as_rational(forcing.a), as_rational(forcing.b)
        return substitute(e, S, Const(a) * t + Const(b))
    raise UnsupportedForcing(f"cannot make {forcing!r} explicit")


def symmetry_condition(p: RpeParams, vf: VectorField, forcing: str = "explicit", symbolic: bool = False) -> Expr:
    """The second-prolonged generator applied to the equation on its manifold.

    ``forcing='opaque'`` keeps p and p' as symbols; ``'explicit'`` inserts the
    constant or power law (the power-law reduction is done in s = a t + b and
    mapped back, so an identically vanishing condition is exactly zero).
    """
    cond = _raw_condition(p, vf, symbolic)
    if forcing == "opaque":
        return cond
    if forcing != "explicit":
        raise ValueError(f"unknown forcing mode {forcing!r}")
    return _explicit(cond, p.forcing, in_s=False)


# ---------------------------------------------------------------------------
# ansatz and determining equations

@dataclass(frozen=True)
class Ansatz:
    """xi = sum c_i_j t^i R^j, eta = sum d_i_j t^i R^j over i + j <= degree."""

    degree: int

    def __post_init__(self):
        if not 0 <= self.degree <= MAX_DEGREE:
            raise ValueError(f"ansatz degree must lie in [0, {MAX_DEGREE}]")

    @property
    def exponents(self) -> list:
        return [(i, n - i) for n in range(self.degree + 1) for i in range(n, -1, -1)]

    @property
    def unknowns(self) -> list:
        return [Param(f"c_{i}_{j}") for i, j in self.exponents] + [Param(f"d_{i}_{j}") for i, j in self.exponents]

    def _poly(self, prefix):
        return normalize(sum((Param(f"{prefix}_{i}_{j}") * t ** i * R ** j for i, j in self.exponents), Const(0)))

    @property
    def xi(self) -> Expr:
        return self._poly("c")

    @property
    def eta(self) -> Expr:
        return self._poly("d")

    def vector_field(self, values=None) -> VectorField:
        """Symbolic field, or the one with the unknowns set to ``values``."""
        vf = VectorField(self.xi, self.eta)
        if values is None:
            return vf
        mapping = {u: Const(as_rational(v)) for u, v in zip(self.unknowns, values)}
        return VectorField(substitute_many(vf.xi, mapping), substitute_many(vf.eta, mapping))


@dataclass
class DeterminingSystem:
    equations: list
    unknowns: list
    labels: list
    by_rdot: dict
    multiplier: Expr
    split_bases: list = field(default_factory=list)

    def matrix(self) -> list:
        """Coefficient rows; needs numeric (non-symbolic) equations."""
        rows = []
        for eq in self.equations:
            parts = collect(eq, self.unknowns)
            row = [Fraction(0)] * len(self.unknowns)
            for key, coef in parts.items():
                if not any(key):
                    raise ValueError(f"equation is not homogeneous: {render(eq)}")
                if not is_constant(coef):
                    raise TypeError("equations carry symbolic coefficients; solve needs numeric parameters")
                row[list(key).index(1)] = constant_value(coef)
            rows.append(row)
        return rows

    def residuals(self, values) -> list:
        mapping = {u: Const(as_rational(v)) for u, v in zip(self.unknowns, values)}
        return [substitute_many(eq, mapping) for eq in self.equations]


def _multiplier(p: RpeParams, symbolic: bool) -> Expr:
    m = Power(R, 3 * p.k_exact + 3)
    if symbolic:
        return normalize(m * Power(Param("Re_inv"), Fraction(-1)))
    if p.re_inv != 0:
        return normalize(m * Const(1 / as_rational(p.re_inv)))
    return normalize(m)


def determining_system(p: RpeParams, ansatz: Ansatz, forcing: str = "explicit", symbolic: bool = False) -> DeterminingSystem:
    """Split the cleared symmetry condition into linear equations.

    The condition is multiplied by R^(3k+3) Re (Re dropped when Re_inv = 0),
    collected in powers of Rdot and then in monomials of (t, R), of (s, R)
    with s = a t + b for power-law forcing, or of (t, R, p, p') when the
    forcing is opaque.
    """
    if not isinstance(ansatz, Ansatz):
        ansatz = Ansatz(int(ansatz))
    cond = _raw_condition(p, ansatz.vector_field(), symbolic)
    mult = _multiplier(p, symbolic)
    if forcing == "opaque":
        bases = [t, R, P, P1]
    elif forcing == "explicit":
        if isinstance(p.forcing, PowerLaw):
            cond = _explicit(cond, p.forcing, in_s=True)
            bases = [S, R]
        else:
            cond = _explicit(cond, p.forcing, in_s=False)
            bases = [t, R]
    else:
        raise ValueError(f"unknown forcing mode {forcing!r}")
    cleared = normalize(mult * cond)
    by_rdot = {k[0]: v for k, v in collect(cleared, [Rdot]).items()}
    equations, labels = [], []
    for power in sorted(by_rdot):
        for key, coef in collect(by_rdot[power], bases).items():
            equations.append(coef)
            labels.append((power, key))
    return DeterminingSystem(equations, ansatz.unknowns, labels, by_rdot, mult, bases)


def solve_symmetries(p: RpeParams, ansatz=1, forcing: str = "explicit") -> list:
    """Basis of the symmetry algebra within the ansatz (possibly empty)."""
    if not isinstance(ansatz, Ansatz):
        ansatz = Ansatz(int(ansatz))
    system = determining_system(p, ansatz, forcing)
    basis = nullspace(system.matrix(), len(system.unknowns))
    return [ansatz.vector_field(v) for v in basis]


def proportional(a: Expr, b: Expr):
    """Monomial m with a == m * b, or None."""
    a, b = normalize(a), normalize(b)
    if is_zero(b):
        return None
    ma, mb = monomials(a), monomials(b)
    if not ma:
        return None
    lead_a = _mono_expr(*next(iter(ma.items())))
    for mono, c in mb.items():
        ratio = normalize(lead_a / _mono_expr(mono, c))
        if len(monomials(ratio)) == 1 and is_zero(a - ratio * b):
            return ratio
    return None


def _mono_expr(mono, c):
    e = Const(c)
    for base, q in mono:
        e = e * Power(base, q)
    return e


# ---------------------------------------------------------------------------
# numeric checks

def verify_symmetry(p: RpeParams, vf: VectorField, n_samples: int = 200, seed: int = 0) -> float:
    """Max |condition| over seeded jet points t in [0,5], R in [0.2,3], Rdot in [-2,2]."""
    cond = symmetry_condition(p, vf, forcing="opaque")
    if is_zero(cond):
        return 0.0
    f = lambdify(cond, ["t", "R", "Rdot"], forcing=p.forcing)
    rng = np.random.default_rng(seed)
    pts = np.column_stack([rng.uniform(0, 5, n_samples), rng.uniform(0.2, 3, n_samples), rng.uniform(-2, 2, n_samples)])
    worst = 0.0
    for tt, rr, vv in pts:
        worst = max(worst, abs(float(f(float(tt), float(rr), float(vv)))))
    return worst


def group_flow(vf: VectorField, epsilon: float, point, rtol: float = 1e-10, atol: float = 1e-12):
    """Integrate dt*/de = xi, dR*/de = eta from ``point`` for parameter ``epsilon``."""
    from .integrate.ode import solve_ode

    t0, r0 = float(point[0]), float(point[1])
    if not r0 > 0:
        raise DomainError("flow start needs R > 0")
    if epsilon == 0:
        return t0, r0
    fxi = lambdify(vf.xi, ["t", "R"])
    feta = lambdify(vf.eta, ["t", "R"])

    def rhs(_, y):
        return (float(fxi(y[0], y[1])), float(feta(y[0], y[1])))

    sol = solve_ode(rhs, 0.0, (t0, r0), float(epsilon), rtol, atol, pos_index=1)
    if not sol.success:
        raise DomainError(f"group flow left the domain R > 0 near epsilon={sol.ts[-1]}")
    return float(sol.ys[-1, 0]), float(sol.ys[-1, 1])


# ---------------------------------------------------------------------------
# reduction by time translation

@dataclass(frozen=True)
class ReducedOde:
    """A(x, y) dy/dx + B(x, y) = 0 with x = R, y = Rdot."""

    A: Expr
    B: Expr

    @property
    def equation(self) -> Expr:
        return normalize(self.A * DYDX + self.B)

    def slope(self, x: float, y: float) -> float:
        a = lambdify(self.A, ["x", "y"])(x, y)
        if a == 0:
            raise DomainError("dy/dx undefined where A(x, y) = 0")
        return -lambdify(self.B, ["x", "y"])(x, y) / a


def reduce_time_translation(p: RpeParams) -> ReducedOde:
    """First-order equation for y(x) from Rddot = y dy/dx, scaled by 2x^2."""
    if not isinstance(p.forcing, Constant):
        raise UnsupportedForcing("time-translation reduction needs constant forcing")
    f = rhs_expr(p, forcing="explicit")
    f_xy = substitute_many(f, {R: X, Rdot: Y})
    two_x2 = Const(2) * X ** 2
    return ReducedOde(normalize(two_x2 * Y), normalize(-two_x2 * f_xy))


# ---------------------------------------------------------------------------
# forcing-exponent scan

@dataclass(frozen=True)
class ScanEntry:
    e: Fraction
    basis: list

    def to_json(self) -> dict:
        return {"e": str(self.e), "basis": [vf.to_json() for vf in self.basis]}


def scan_exponents(p: RpeParams, exponents, degree: int = 1, c=1, a=1, b=1) -> list:
    """Solve for symmetries with forcing c (a t + b)^e at each exponent."""
    out = []
    for e in exponents:
        e = as_rational(e)
        q = p.with_forcing(PowerLaw(c, a, b, e))
        out.append(ScanEntry(e, solve_symmetries(q, degree)))
    return out


def selected_exponents(entries, reference: int = 1) -> list:
    """Exponents whose basis is larger than at e = 0 (constant forcing) or nonempty otherwise."""
    return [en.e for en in entries if en.e != 0 and len(en.basis) >= reference]


def exponent_grid(lo, hi, step) -> list:
    lo, hi, step = as_rational(lo), as_rational(hi), as_rational(step)
    if step <= 0:
        raise ValueError("step must be positive")
    out, e = [], lo
    while e <= hi:
        out.append(e)
        e += step
    return out
