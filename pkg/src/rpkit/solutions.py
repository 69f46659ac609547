"""Closed-form results for the bubble equation and their checks.

Equilibria, the inviscid first integral, the collapse-time quadrature and
the invariant solutions attached to the scaling symmetries.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .core_model import Constant, PowerLaw, RpeParams, State, rhs
from .errors import DomainError, UnsupportedForcing

EQUILIBRIUM = "EQUILIBRIUM"
RDOT2_INVISCID = "RDOT2_INVISCID"
COLLAPSE_TIME = "COLLAPSE_TIME"
CASE_1_2 = "CASE_1_2"
CASE_2 = "CASE_2"
CASE_3 = "CASE_3"


class CardanoMismatchWarning(RuntimeWarning):
    pass


def _p0(p: RpeParams, p0) -> float:
    if p0 is not None:
        return float(p0)
    if not isinstance(p.forcing, Constant):
        raise UnsupportedForcing("this result needs constant forcing (or an explicit p0)")
    return float(p.forcing.p0)


def _is_one(k) -> bool:
    return (Fraction(k) == 1) if not isinstance(k, float) else abs(k - 1) < 1e-12


# ---------------------------------------------------------------------------
# closed forms evaluated along t

@dataclass(frozen=True)
class ClosedForm:
    """A curve R(t) with its first two derivatives and the regime it is valid in."""

    case_id: str
    params: RpeParams
    constants: dict
    evaluator: Callable = field(repr=False)
    validity: str = ""

    def __call__(self, t):
        return self.evaluator(np.asarray(t, dtype=float))

    def scaled(self, factor: float) -> "ClosedForm":
        """Every returned quantity multiplied by ``factor`` (a deliberate non-solution)."""
        inner = self.evaluator

        def ev(t):
            r, v, a = inner(t)
            return factor * r, factor * v, factor * a

        return replace(self, evaluator=ev, constants={**self.constants, "scale": factor})

    def to_json(self) -> dict:
        return {
            "case": self.case_id,
            "params": self.params.to_json(),
            "constants": {k: float(v) for k, v in self.constants.items()},
            "validity": self.validity,
        }


def _power_curve(amp: float, q: float):
    """amp (t+1)^q and its derivatives."""

    def ev(t):
        tau = t + 1.0
        r = amp * tau ** q
        return r, q * r / tau, q * (q - 1) * r / tau ** 2

    return ev


def _require(cond: bool, msg: str):
    if not cond:
        raise DomainError(msg)


def _unit_power_law(p: RpeParams, e) -> PowerLaw:
    f = p.forcing
    _require(isinstance(f, PowerLaw) and f.a == 1 and f.b == 1, "forcing must be c (t + 1)^e")
    if e is not None:
        _require(Fraction(f.e) == Fraction(e), f"forcing exponent must be {e}")
    return f


def invariant_case_1_2(p: RpeParams) -> ClosedForm:
    """R = (p_n / (Th c))^(1/3) (t+1)^(2/5) for k = 1 without viscosity or tension."""
    _require(p.re_inv == 0 and p.we == 0 and _is_one(p.k), "needs re_inv = 0, we = 0, k = 1")
    f = _unit_power_law(p, Fraction(-6, 5))
    thc = float(p.th) * float(f.c)
    _require(thc > 0 and p.p_n > 0, "needs th c > 0 and p_n > 0")
    amp = (float(p.p_n) / thc) ** (1.0 / 3.0)
    return ClosedForm(CASE_1_2, p, {"A": amp}, _power_curve(amp, 0.4),
                      "re_inv = 0, we = 0, k = 1, p = c (t+1)^(-6/5)")


def case_2_amplitude_squared(re_inv: float, thc: float, p_n: float) -> float:
    """B^2 = 2 (sqrt((2 Th + Re_inv)^2 + 2 p_n) - 2 Th - Re_inv)."""
    s = 2 * thc + re_inv
    return 2 * (math.sqrt(s * s + 2 * p_n) - s)


def invariant_case_2(p: RpeParams) -> ClosedForm:
    """R = B (t+1)^(1/2) for k = 2/3, we = 0, p = c / (t+1)."""
    _require(p.we == 0 and Fraction(p.k) == Fraction(2, 3), "needs we = 0, k = 2/3")
    f = _unit_power_law(p, -1)
    thc = float(p.th) * float(f.c)
    b2 = case_2_amplitude_squared(float(p.re_inv), thc, float(p.p_n))
    assert b2 > 0 or p.p_n == 0
    _require(b2 > 0, "needs p_n > 0")
    amp = math.sqrt(b2)
    return ClosedForm(CASE_2, p, {"B": amp, "B2": b2}, _power_curve(amp, 0.5),
                      "we = 0, k = 2/3, p = c (t+1)^(-1)")


def case_3_amplitude(we: float, thc: float, p_n: float) -> tuple[float, float]:
    """(C, Y) with C = (Y - 3 Th / Y) / 2, the real root of C^3 + 9Th/4 C + 9/4 (We - p_n) = 0."""
    d = we - p_n
    y3 = 3 * math.sqrt(9 * d * d + 3 * thc ** 3) - 9 * we + 9 * p_n
    if y3 <= 0:
        raise DomainError("auxiliary Y vanishes (Th = 0 with We >= p_n): no positive invariant solution")
    y = y3 ** (1.0 / 3.0)
    return 0.5 * (y - 3 * thc / y), y


def invariant_case_3(p: RpeParams, e=None) -> ClosedForm:
    """R = C (t+1)^(2/3) for k = 1/3 without viscosity.

    The curve does not depend on the forcing exponent; ``e`` (default: the
    exponent already in ``p``) only fixes the equation it is checked against.
    """
    _require(p.re_inv == 0 and Fraction(p.k) == Fraction(1, 3), "needs re_inv = 0, k = 1/3")
    if e is not None:
        f = p.forcing if isinstance(p.forcing, PowerLaw) else PowerLaw(1, 1, 1, e)
        p = p.with_forcing(PowerLaw(f.c, 1, 1, e))
    f = _unit_power_law(p, None)
    thc = float(p.th) * float(f.c)
    c, y = case_3_amplitude(float(p.we), thc, float(p.p_n))
    _require(c > 0, "amplitude C must be positive")
    return ClosedForm(CASE_3, p, {"C": c, "Y": y, "e": float(f.e)}, _power_curve(c, 2.0 / 3.0),
                      "re_inv = 0, k = 1/3, p = c (t+1)^e; an exact solution only for e = -2/3")


def equilibrium_form(p: RpeParams, p0=None) -> ClosedForm:
    r = equilibrium_radius(p, p0)
    q = p if p0 is None else p.with_forcing(Constant(p0))

    def ev(t):
        z = np.zeros_like(t)
        return r + z, z, z

    return ClosedForm(EQUILIBRIUM, q, {"R_eq": r}, ev, "constant forcing, th p0 > 0, p_n > 0")


def verify_closed_form(cf: ClosedForm, times) -> float:
    """Max |R'' - f(t, R, R')| along the curve."""
    worst = 0.0
    for tt in np.atleast_1d(np.asarray(times, dtype=float)):
        r, v, a = cf(float(tt))
        res = a - rhs(cf.params, State(float(tt), float(r), float(v)))
        worst = max(worst, abs(res))
    return worst


# ---------------------------------------------------------------------------
# equilibrium

def equilibrium_cardano(thp0: float, we: float, p_n: float) -> float:
    """Closed-form positive root of Th p0 R^3 + We R^2 - p_n = 0 via the auxiliary Y."""
    a = thp0
    disc = complex(p_n * (27 * a * a * p_n - 4 * we ** 3))
    y3 = 4 * 3 ** 1.5 * a * cmath.sqrt(disc) - 8 * we ** 3 + 108 * a * a * p_n
    y = y3 ** (1.0 / 3.0) if y3 != 0 else 0j
    if y == 0:
        raise DomainError("auxiliary Y vanishes")
    r = (y / 2 + 2 * we * we / y - we) / (3 * a)
    return r.real if abs(r.imag) <= 1e-9 * max(1.0, abs(r.real)) else math.nan


def equilibrium_radius(p: RpeParams, p0=None, check_cardano: bool = True) -> float:
    """Positive root of Th p0 R^(3k) + We R^(3k-1) - p_n = 0 by bracketing."""
    thp0 = float(p.th) * _p0(p, p0)
    we, pn, k = float(p.we), float(p.p_n), float(p.k)
    _require(thp0 > 0 and pn > 0 and we >= 0, "needs th p0 > 0, p_n > 0, we >= 0")

    def g(r):
        return thp0 * r ** (3 * k) + we * r ** (3 * k - 1) - pn

    lo, hi = 1.0, 1.0
    for _ in range(2000):
        if g(hi) > 0:
            break
        hi *= 2
    for _ in range(2000):
        if g(lo) < 0:
            break
        lo /= 2
    if not (g(lo) < 0 < g(hi)):
        raise DomainError("no positive equilibrium radius")
    r = brentq(g, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    if check_cardano and _is_one(p.k):
        rc = equilibrium_cardano(thp0, we, pn)
        if not abs(rc - r) <= 1e-12 * r:
            warnings.warn(f"closed-form equilibrium {rc} disagrees with numeric root {r}; using numeric",
                          CardanoMismatchWarning, stacklevel=2)
    return r


# ---------------------------------------------------------------------------
# inviscid first integral and collapse time

def _gas_kernel(ln_x: float, k) -> float:
    """(1 - x^(3-3k)) / (k-1) written to stay accurate as k -> 1 (limit 3 ln x)."""
    if _is_one(k):
        return 3.0 * ln_x
    kf = float(k)
    return -math.expm1((3 - 3 * kf) * ln_x) / (kf - 1)


def rdot_squared_inviscid(p: RpeParams, p0=None, r=1.0) -> float:
    """Rdot^2 on the trajectory released from rest at R = 1 (Re_inv = We = 0).

    2/3 p0 Th (1/R^3 - 1) + 2/3 (1/R^3 - 1/R^(3k)) p_n / (k-1), with the
    k = 1 limit 2/3 p0 Th (1/R^3 - 1) + 2 p_n ln(R) / R^3.
    """
    _require(p.re_inv == 0 and p.we == 0, "needs re_inv = 0 and we = 0")
    r = float(r)
    _require(r > 0, "R must be positive")
    thp0 = float(p.th) * _p0(p, p0)
    lnr = math.log(r)
    gas = _gas_kernel(lnr, p.k) / r ** 3  # (1/R^3 - 1/R^(3k)) / (k-1)
    return (2.0 / 3.0) * thp0 * (r ** -3 - 1) + (2.0 / 3.0) * gas * float(p.p_n)


@dataclass(frozen=True)
class CollapseResult:
    t: float
    abserr: float
    neval: int
    r_end: float
    substitution: str = "a = 1 - u^2"

    def to_json(self) -> dict:
        return {"t": self.t, "abserr": self.abserr, "neval": self.neval, "r_end": self.r_end,
                "substitution": self.substitution}


def _gas_ratio(u: float, k) -> float:
    """((a^(3-3k) - 1) / (k-1)) / u^2 at a = 1 - u^2; limit 3 as u -> 0."""
    if u == 0.0:
        return 3.0
    return -_gas_kernel(math.log1p(-u * u), k) / (u * u)


def _h_over_u2(u: float, thp0: float, pn: float, k) -> float:
    """Radicand (1 - a^3) Th p0 - p_n (a^(3-3k) - 1)/(k-1) divided by u^2."""
    a = 1.0 - u * u
    return (1.0 + a + a * a) * thp0 - pn * _gas_ratio(u, k)


def collapse_time(p: RpeParams, p0=None, r_end: float = 0.0, full_output: bool = False,
                  epsabs: float = 1e-12):
    """Time for a bubble released from rest at R = 1 to shrink to ``r_end``.

    t = sqrt(3/2) int_{r_end}^1 a^(3/2) h(a)^(-1/2) da, evaluated after the
    substitution a = 1 - u^2 which removes the inverse square root at a = 1.
    """
    _require(p.re_inv == 0 and p.we == 0, "needs re_inv = 0 and we = 0")
    r_end = float(r_end)
    _require(0.0 <= r_end <= 1.0, "r_end must lie in [0, 1]")
    thp0 = float(p.th) * _p0(p, p0)
    pn = float(p.p_n)
    if r_end == 1.0:
        res = CollapseResult(0.0, 0.0, 0, r_end)
        return res if full_output else 0.0
    upper = math.sqrt(1.0 - r_end)
    probe = np.linspace(0.0, upper, 257)
    if upper == 1.0:
        probe = probe[:-1]
    if any(not _h_over_u2(float(u), thp0, pn, p.k) > 0 for u in probe):
        raise DomainError(f"the bubble never reaches R = {r_end}: the radicand is not positive on the path")

    def integrand(u):
        a = 1.0 - u * u
        h = _h_over_u2(u, thp0, pn, p.k)
        if not h > 0:
            raise DomainError(f"the bubble never reaches R = {r_end}: radicand vanishes near R = {a}")
        return 2.0 * a ** 1.5 / math.sqrt(h)

    val, abserr, info = quad(integrand, 0.0, upper, epsabs=epsabs, epsrel=1e-13, limit=200, full_output=1)[:3]
    t = math.sqrt(1.5) * val
    res = CollapseResult(t, math.sqrt(1.5) * abserr, int(info["neval"]), r_end)
    return res if full_output else t
