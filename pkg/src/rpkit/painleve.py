"""Leading-order (dominant balance) step of the Painleve test.

An ODE written as a sum of power terms ``coef * t^e_t R^e_R R'^e_Rd R''^e_Rdd``
is probed with ``R = a0 * tau**(-alpha)``, ``tau = t - t0``. Each term then
scales like ``tau**E(alpha)`` with E linear in alpha; the t factor is frozen
at the movable point ``t0``.

Two sources of balances are searched:

* families: two or more terms whose exponents coincide for every alpha.
  Their leading coefficients must cancel, which is a polynomial equation in
  alpha. A family that dominates every other term for all alpha > 0 governs
  the pole ansatz, and its alpha roots are reported as they come out, which
  is how the classical argument runs for the Rayleigh-Plesset equation.
  Otherwise a root is kept only where the family actually dominates.
* crossings: an alpha where terms of different families tie for the lowest
  exponent. The dominant set is every term at that minimum. Negative alpha
  (R -> 0 at t0) is only a singularity when some term carries a negative
  power of R, so for equations regular at R = 0 such crossings are skipped.

A balance whose a0 equation has no nonzero root is not a balance; those are
listed under ``rejected``. The verdict is PASS when some balance has alpha a
positive integer (any nonzero integer with ``integers="any"``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .core_model import Constant, PowerLaw, RpeParams, residual_expr
from .errors import UnsupportedForcing
from .symbolic import (
    Const,
    Expr,
    Opaque,
    Param,
    Power,
    R,
    Rddot,
    Rdot,
    collect,
    constant_value,
    is_constant,
    is_zero,
    normalize,
    render,
    substitute,
    t,
)

MAX_TERMS = 16

ALPHA = Param("a")
A0 = Param("a0")
T0 = Param("t0")


@dataclass(frozen=True)
class PowerTerm:
    coef: Expr
    e_t: Fraction = Fraction(0)
    e_R: Fraction = Fraction(0)
    e_Rdot: Fraction = Fraction(0)
    e_Rddot: Fraction = Fraction(0)

    @property
    def a0_power(self) -> Fraction:
        return self.e_R + self.e_Rdot + self.e_Rddot

    @property
    def slope(self) -> Fraction:
        """u in E(alpha) = u*alpha + v."""
        return -self.a0_power

    @property
    def offset(self) -> Fraction:
        return -self.e_Rdot - 2 * self.e_Rddot

    def expr(self) -> Expr:
        return normalize(
            self.coef * Power(t, self.e_t) * Power(R, self.e_R)
            * Power(Rdot, self.e_Rdot) * Power(Rddot, self.e_Rddot)
        )

    def leading(self) -> Expr:
        """Leading coefficient after R -> a0 tau^-a, as an Expr in a and a0."""
        return normalize(
            self.coef * Power(T0, self.e_t) * Power(A0, self.a0_power)
            * Power(-ALPHA, self.e_Rdot) * Power(ALPHA * (ALPHA + 1), self.e_Rddot)
        )

    def __str__(self):
        return render(self.expr())


@dataclass(frozen=True)
class Candidate:
    alpha: Fraction
    dominant: tuple
    a0_equation: Expr
    a0_roots: str
    kind: str  # "family" or "crossing"

    def to_json(self) -> dict:
        return {
            "alpha": str(self.alpha),
            "dominant": list(self.dominant),
            "a0_equation": render(self.a0_equation),
            "a0_roots": self.a0_roots,
            "kind": self.kind,
        }


@dataclass
class BalanceReport:
    terms: list
    candidates: list
    verdict: str
    reason: str = ""
    rejected: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_json(self) -> dict:
        out = {
            "terms": [str(x) for x in self.terms],
            "candidates": [c.to_json() for c in self.candidates],
            "verdict": self.verdict,
        }
        if self.reason:
            out["reason"] = self.reason
        if self.rejected:
            out["rejected"] = [c.to_json() for c in self.rejected]
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _term_order(term: PowerTerm):
    return (-term.e_Rddot, -term.e_Rdot, term.e_R == 0, term.e_R, -term.e_t)


def power_terms_from_expr(e: Expr) -> list:
    """Split an equation ``e = 0`` into power terms (zero coefficients dropped)."""
    parts = collect(e, [t, R, Rdot, Rddot])
    terms = [
        PowerTerm(coef, *(Fraction(x) for x in key))
        for key, coef in parts.items()
        if not is_zero(coef)
    ]
    return sorted(terms, key=_term_order)


def to_power_terms(p: RpeParams) -> list:
    """Power terms of R'' - f for constant or power-law forcing.

    A power-law pressure becomes the coefficient ``Th*p(t)`` frozen at the
    movable point; it has no tau exponent of its own.
    """
    if isinstance(p.forcing, Constant):
        e = residual_expr(p, forcing="explicit")
    elif isinstance(p.forcing, PowerLaw):
        e = residual_expr(p, forcing="opaque")
    else:
        raise UnsupportedForcing(f"leading-order analysis needs constant or power-law forcing, got {p.forcing!r}")
    return power_terms_from_expr(e)


def tau_exponent(term: PowerTerm, alpha) -> Fraction:
    alpha = Fraction(alpha)
    return -alpha * term.e_R - (alpha + 1) * term.e_Rdot - (alpha + 2) * term.e_Rddot


# ---------------------------------------------------------------------------

def _rational_roots(coeffs: dict) -> tuple[list, bool]:
    """Distinct rational roots of ``sum c_k x**k`` and whether it split completely."""
    lo = min(coeffs)
    deg = max(coeffs) - lo
    work = [Fraction(coeffs.get(lo + i, 0)) for i in range(deg + 1)]
    roots = [Fraction(0)] if lo > 0 else []
    while len(work) > 1:
        den = math.lcm(*(c.denominator for c in work))
        ints = [int(c * den) for c in work]
        if ints[0] == 0:
            roots.append(Fraction(0))
            work = work[1:]
            continue
        hit = next((r for r in _candidates(ints[0], ints[-1]) if _horner(ints, r) == 0), None)
        if hit is None:
            break
        roots.append(hit)
        work = _deflate(work, hit)
    return sorted(set(roots)), len(work) == 1


def _candidates(const: int, lead: int):
    for pnum in _divisors(abs(const)):
        for qden in _divisors(abs(lead)):
            yield Fraction(pnum, qden)
            yield Fraction(-pnum, qden)


def _divisors(n: int):
    small = [d for d in range(1, int(math.isqrt(n)) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def _horner(ints, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(ints):
        acc = acc * x + c
    return acc


def _deflate(ints, r: Fraction):
    """Divide sum ints[i] x^i by (x - r); coefficients stay rational."""
    n = len(ints) - 1
    out = [Fraction(0)] * n
    acc = Fraction(0)
    for i in range(n, 0, -1):
        acc = acc * r + ints[i]
        out[i - 1] = acc
    return out


def _describe_a0(eq: Expr) -> tuple[bool, str]:
    """(has a nonzero root, description) for a leading-coefficient equation."""
    if is_zero(eq):
        return True, "a0 arbitrary"
    parts = collect(eq, [A0])
    if len(parts) == 1:
        return False, "no nonzero root"
    if len(parts) == 2:
        (m2, c2), (m1, c1) = sorted(parts.items())
        d = Fraction(m1[0]) - Fraction(m2[0])
        rhs = normalize(-c2 / c1)
        desc = f"a0^({d}) = {render(rhs)}" if d != 1 else f"a0 = {render(rhs)}"
        if is_constant(rhs):
            val = constant_value(rhs)
            real = _real_roots(val, d)
            if real:
                desc += "; real roots " + ", ".join(_fmt(r) for r in real)
        return True, desc
    return True, render(eq) + " = 0"


def _real_roots(val: Fraction, d: Fraction) -> list:
    """Real nonzero solutions of a0**d = val."""
    if val == 0:
        return []
    num, den = d.numerator, d.denominator
    # a0**num = val**den
    target = float(val) ** den if den % 2 or val > 0 else None
    if target is None:
        return []
    n = abs(num)
    if num < 0:
        target = 1.0 / target
    if target > 0:
        r = target ** (1.0 / n)
        roots = [r, -r] if n % 2 == 0 else [r]
    else:
        roots = [-((-target) ** (1.0 / n))] if n % 2 else []
    exact = []
    for r in roots:
        fr = Fraction(r).limit_denominator(10 ** 6)
        exact.append(fr if abs(float(fr) - r) < 1e-12 * max(1.0, abs(r)) else r)
    return sorted(exact, key=float)


def _fmt(x) -> str:
    return str(x) if isinstance(x, Fraction) else repr(x)


def _leading_sum(terms, subset) -> Expr:
    return normalize(sum((terms[i].leading() for i in subset), Const(0)))


def dominant_balance(terms: list, integers: str = "positive") -> BalanceReport:
    """Enumerate dominant balances and decide the leading-order verdict."""
    if integers not in ("positive", "any"):
        raise ValueError("integers must be 'positive' or 'any'")
    n = len(terms)
    if n < 2:
        raise ValueError("dominant balance needs at least two terms")
    if n > MAX_TERMS:
        raise ValueError(f"at most {MAX_TERMS} terms supported, got {n}")

    lines = [(term.slope, term.offset) for term in terms]
    singular_at_zero = any(term.e_R < 0 for term in terms)
    candidates, rejected, notes = [], [], []

    classes = {}
    for i, ln in enumerate(lines):
        classes.setdefault(ln, []).append(i)

    def exps(alpha):
        return [u * alpha + v for u, v in lines]

    def dominates_at(members, alpha):
        e = exps(alpha)
        lo = e[members[0]]
        return all(e[j] >= lo for j in range(n))

    for (u, v), members in classes.items():
        if len(members) < 2:
            continue
        others = [lines[j] for j in range(n) if j not in members]
        pole_regime = all(uj >= u and vj >= v for uj, vj in others)
        general = _leading_sum(terms, members)
        poly = collect(general, [A0])
        if not poly:
            notes.append(f"terms {members} cancel identically")
            continue
        (_, in_alpha), = poly.items()
        coeffs = collect(in_alpha, [ALPHA])
        if not all(is_constant(c) for c in coeffs.values()):
            notes.append(f"family {members}: alpha equation has symbolic coefficients")
            continue
        roots, complete = _rational_roots({int(k[0]): constant_value(c) for k, c in coeffs.items()})
        if not complete:
            notes.append(f"family {members}: some alpha roots are irrational, hence non-integer")
        for alpha in roots:
            if alpha == 0:
                continue
            if not (pole_regime or dominates_at(members, alpha)):
                continue
            candidates.append(Candidate(alpha, tuple(members), general, "a0 arbitrary", "family"))

    crossings = set()
    for i, j in itertools.combinations(range(n), 2):
        (ui, vi), (uj, vj) = lines[i], lines[j]
        if ui != uj:
            crossings.add((vj - vi) / (ui - uj))
    for alpha in sorted(crossings):
        if alpha == 0 or (alpha < 0 and not singular_at_zero):
            continue
        e = exps(alpha)
        lo = min(e)
        dominant = tuple(i for i in range(n) if e[i] == lo)
        if len({lines[i] for i in dominant}) < 2:
            continue
        eq = normalize(substitute(_leading_sum(terms, dominant), ALPHA, Const(alpha)))
        ok, desc = _describe_a0(eq)
        cand = Candidate(alpha, dominant, eq, desc, "crossing")
        (candidates if ok else rejected).append(cand)

    candidates.sort(key=lambda c: (c.alpha, c.dominant))
    rejected.sort(key=lambda c: (c.alpha, c.dominant))

    def acceptable(alpha):
        if alpha.denominator != 1:
            return False
        return alpha > 0 if integers == "positive" else alpha != 0

    good = [c for c in candidates if acceptable(c.alpha)]
    if good:
        return BalanceReport(terms, candidates, "PASS", "", rejected, notes)
    if candidates:
        alphas = ", ".join(str(c.alpha) for c in candidates)
        kind = "a positive integer" if integers == "positive" else "a nonzero integer"
        reason = f"leading power alpha in {{{alphas}}} is not {kind}"
    else:
        reason = "no consistent dominant balance"
    return BalanceReport(terms, candidates, "FAIL", reason, rejected, notes)


def painleve_report(p: RpeParams, integers: str = "positive") -> BalanceReport:
    return dominant_balance(to_power_terms(p), integers=integers)


P1_STANDARD = "Rddot - 6*R^2 - t"
