"""Expression trees over jet coordinates and their canonical form.

Node kinds are deliberately few: rational constants, symbols (jet variables
and parameters), the opaque forcing ``p(t)`` with its formal time
derivatives, sums, products and powers with exact rational exponents.
Everything symbolic funnels through one canonical representation, a mapping
from monomials to rational coefficients. A monomial is a sorted tuple of
``(base, exponent)`` pairs with distinct bases; a base is a symbol, an
opaque derivative, a numeric constant raised to a non-integer power, a sum
that cannot be expanded (negative or fractional exponent), or a power whose
exponent is still symbolic.

Power simplifications such as ``(x*y)**q -> x**q * y**q`` assume positive
bases. That holds for the radius, the shifted time and every coefficient in
this package; the radial velocity only ever appears with integer exponents.
"""

from __future__ import annotations

import math
import numbers
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from ..errors import DomainError

ONE = Fraction(1)
ZERO = Fraction(0)

JET_ORDER = {"t": 0, "s": 1, "R": 2, "Rdot": 3, "Rddot": 4}


class UnboundSymbolError(KeyError):
    """A free symbol has no numeric binding during evaluation."""


def as_rational(x) -> Fraction:
    """Convert ints, floats (via their shortest repr), strings and constants
    to an exact ``Fraction``."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"cannot make {x!r} rational")
        return Fraction(repr(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, Const):
        return x.value
    if isinstance(x, numbers.Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, numbers.Real):
        return as_rational(float(x))
    raise TypeError(f"cannot make {type(x).__name__} rational")


class Expr:
    __slots__ = ("_hash",)

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__, self._key()))
            object.__setattr__(self, "_hash", h)
            return h

    def __setattr__(self, name, value):
        raise AttributeError("expressions are immutable")

    def __repr__(self):
        args = ", ".join(repr(a) for a in self._key())
        return f"{type(self).__name__}({args})"

    def __str__(self):
        return render(self)

    # Arithmetic builds normalized results.
    def __add__(self, other):
        return normalize(Sum((self, _coerce(other))))

    def __radd__(self, other):
        return normalize(Sum((_coerce(other), self)))

    def __sub__(self, other):
        return normalize(Sum((self, Product((Const(-1), _coerce(other))))))

    def __rsub__(self, other):
        return normalize(Sum((_coerce(other), Product((Const(-1), self)))))

    def __mul__(self, other):
        return normalize(Product((self, _coerce(other))))

    def __rmul__(self, other):
        return normalize(Product((_coerce(other), self)))

    def __truediv__(self, other):
        return normalize(Product((self, Power(_coerce(other), Fraction(-1)))))

    def __rtruediv__(self, other):
        return normalize(Product((_coerce(other), Power(self, Fraction(-1)))))

    def __neg__(self):
        return normalize(Product((Const(-1), self)))

    def __pow__(self, q):
        return normalize(Power(self, q))


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", as_rational(value))

    def _key(self):
        return (self.value,)


class Symbol(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def _key(self):
        return (self.name,)


class Var(Symbol):
    """Jet coordinate: ``t``, ``R``, ``Rdot``, ``Rddot`` (or shifted time ``s``)."""

    __slots__ = ()


class Param(Symbol):
    """Coefficient symbol: equation coefficients, ansatz unknowns, ``a0``..."""

    __slots__ = ()


class Opaque(Expr):
    """The ``order``-th time derivative of an unspecified function of ``t``."""

    __slots__ = ("name", "order")

    def __init__(self, name: str = "p", order: int = 0):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "order", int(order))

    def _key(self):
        return (self.name, self.order)


class Sum(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms):
        object.__setattr__(self, "terms", tuple(terms))

    def _key(self):
        return self.terms


class Product(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors):
        object.__setattr__(self, "factors", tuple(factors))

    def _key(self):
        return self.factors


class Power(Expr):
    """``base ** exp``; ``exp`` is a Fraction, or an Expr while still symbolic."""

    __slots__ = ("base", "exp")

    def __init__(self, base, exp):
        object.__setattr__(self, "base", _coerce(base))
        if isinstance(exp, Expr):
            if isinstance(exp, Const):
                exp = exp.value
        else:
            exp = as_rational(exp)
        object.__setattr__(self, "exp", exp)

    def _key(self):
        return (self.base, self.exp)


def _coerce(x) -> Expr:
    if isinstance(x, Expr):
        return x
    return Const(x)


t = Var("t")
R = Var("R")
Rdot = Var("Rdot")
Rddot = Var("Rddot")
P = Opaque("p", 0)
P1 = Opaque("p", 1)


# ---------------------------------------------------------------------------
# canonical polynomial form

def _is_deferred(b) -> bool:
    return isinstance(b, Power)


@lru_cache(maxsize=None)
def _bkey(b):
    if isinstance(b, Var):
        return (0, JET_ORDER.get(b.name, 9), b.name)
    if isinstance(b, Param):
        return (1, 0, b.name)
    if isinstance(b, Opaque):
        return (2, b.order, b.name)
    if isinstance(b, Const):
        return (3, 0, str(b.value))
    if isinstance(b, Power):
        return (4, 0, render(b))
    return (5, 0, render(b))


def _mkey(mono):
    return (len(mono), tuple((_bkey(b), q) for b, q in mono))


def _needs_expand(mono) -> bool:
    return any(isinstance(b, Sum) and q.denominator == 1 and q > 0 for b, q in mono)


def _mono_mul(m1, m2):
    """Product of two monomials as (monomial, rational factor)."""
    if not m1:
        return m2, ONE
    if not m2:
        return m1, ONE
    d = dict(m1)
    for b, q in m2:
        d[b] = d.get(b, ZERO) + q
    coef = ONE
    items = []
    for b, q in d.items():
        if q == 0:
            continue
        if isinstance(b, Const) and q.denominator == 1:
            coef *= b.value ** int(q)
            continue
        items.append((b, q))
    items.sort(key=lambda bq: _bkey(bq[0]))
    return tuple(items), coef


def _padd(p1, p2, scale=ONE):
    out = dict(p1)
    for m, c in p2.items():
        v = out.get(m, ZERO) + c * scale
        if v:
            out[m] = v
        else:
            out.pop(m, None)
    return out


def _expand_mono(mono, c):
    """Rewrite a monomial holding a Sum base at a positive integer power."""
    acc = {(): c}
    rest = []
    for b, q in mono:
        if isinstance(b, Sum) and q.denominator == 1 and q > 0:
            acc = _pmul(acc, _ppow_int(_poly(b), int(q)))
        else:
            rest.append((b, q))
    return _pmul(acc, {tuple(rest): ONE})


def _pmul(p1, p2):
    if not p1 or not p2:
        return {}
    out = {}
    for m1, c1 in p1.items():
        for m2, c2 in p2.items():
            m, k = _mono_mul(m1, m2)
            c = c1 * c2 * k
            if _needs_expand(m):
                out = _padd(out, _expand_mono(m, c))
                continue
            v = out.get(m, ZERO) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _ppow_int(p, n: int):
    result = {(): ONE}
    base = p
    while n:
        if n & 1:
            result = _pmul(result, base)
        n >>= 1
        if n:
            base = _pmul(base, base)
    return result


def _iroot(n: int, d: int):
    """Exact integer d-th root of n >= 0, or None."""
    if n < 2:
        return n
    r = int(round(n ** (1.0 / d))) if n.bit_length() < 1000 else 1 << (n.bit_length() // d)
    lo, hi = max(r - 2, 0), r + 2
    if hi ** d < n:  # float guess far off; bisect
        lo, hi = 0, 1 << (n.bit_length() // d + 1)
        while lo < hi:
            mid = (lo + hi) // 2
            if mid ** d < n:
                lo = mid + 1
            else:
                hi = mid
        return lo if lo ** d == n else None
    for cand in range(lo, hi + 1):
        if cand ** d == n:
            return cand
    return None


def _rational_power(c: Fraction, q: Fraction):
    """Exact c**q when it is rational, else None."""
    if q.denominator == 1:
        return c ** int(q)
    d = q.denominator
    sign = 1
    if c < 0:
        if d % 2 == 0:
            return None
        sign = -1
        c = -c
    num = _iroot(c.numerator, d)
    den = _iroot(c.denominator, d)
    if num is None or den is None:
        return None
    return (sign * Fraction(num, den)) ** q.numerator


def _ppow(p, q: Fraction):
    if q == 0:
        return {(): ONE}
    if not p:
        if q > 0:
            return {}
        raise ZeroDivisionError("zero raised to a negative power")
    if q.denominator == 1 and q > 0:
        return _ppow_int(p, int(q))
    if len(p) == 1:
        (mono, c), = p.items()
        items = {}
        coef = ONE
        for b, e in mono:
            items[b] = items.get(b, ZERO) + e * q
        exact = _rational_power(c, q)
        if exact is None:
            items[Const(c)] = items.get(Const(c), ZERO) + q
        else:
            coef = exact
        m, k = _mono_mul(tuple(sorted(items.items(), key=lambda bq: _bkey(bq[0]))), ())
        out = {m: coef * k}
        if _needs_expand(m):
            return _expand_mono(m, coef * k)
        return out
    return {((_from_poly(p), q),): ONE}


def _poly(e):
    if isinstance(e, (Sum, Power)):
        return _poly_cached(e)
    return _poly_uncached(e)


@lru_cache(maxsize=8192)
def _poly_cached(e):
    # Callers never mutate the returned map.
    return _poly_uncached(e)


def _poly_uncached(e):
    if isinstance(e, Const):
        return {(): e.value} if e.value else {}
    if isinstance(e, (Symbol, Opaque)):
        return {((e, ONE),): ONE}
    if isinstance(e, Sum):
        out = {}
        for term in e.terms:
            out = _padd(out, _poly(term))
        return out
    if isinstance(e, Product):
        out = {(): ONE}
        for f in e.factors:
            out = _pmul(out, _poly(f))
            if not out:
                break
        return out
    if isinstance(e, Power):
        bp = _poly(e.base)
        q = e.exp
        if isinstance(q, Expr):
            qp = _poly(q)
            if not qp:
                q = ZERO
            elif set(qp) == {()}:
                q = qp[()]
            else:
                return {((Power(_from_poly(bp), _from_poly(qp)), ONE),): ONE}
        return _ppow(bp, q)
    raise TypeError(f"not an expression: {e!r}")


def _term(mono, c):
    factors = [b if q == 1 else Power(b, q) for b, q in mono]
    if not factors:
        return Const(c)
    if c == 1 and len(factors) == 1:
        return factors[0]
    if c != 1:
        factors.insert(0, Const(c))
    return Product(tuple(factors))


_INTERNED: dict = {}


def _from_poly(p) -> Expr:
    if not p:
        return Const(0)
    monos = sorted(p, key=_mkey)
    terms = [_term(m, p[m]) for m in monos]
    if len(terms) == 1:
        return terms[0]
    # Canonical sums recur as power bases; sharing them makes equality cheap.
    s = Sum(tuple(terms))
    if len(_INTERNED) > 100_000:
        _INTERNED.clear()
    return _INTERNED.setdefault(s, s)


def normalize(e) -> Expr:
    """Canonical flat sum of monomials; idempotent."""
    return _from_poly(_poly(_coerce(e)))


def monomials(e) -> dict:
    """The canonical ``{monomial: coefficient}`` map of ``e``."""
    return dict(_poly(_coerce(e)))


def is_zero(e) -> bool:
    return not _poly(_coerce(e))


def is_constant(e) -> bool:
    return set(_poly(_coerce(e))) <= {()}


def constant_value(e) -> Fraction:
    p = _poly(_coerce(e))
    if not set(p) <= {()}:
        raise ValueError(f"{render(e)} is not constant")
    return p.get((), ZERO)


# ---------------------------------------------------------------------------
# symbols

def free_symbols(e) -> frozenset:
    return _free(_coerce(e))


@lru_cache(maxsize=4096)
def _free(e):
    if isinstance(e, (Symbol, Opaque)):
        return frozenset((e,))
    if isinstance(e, Const):
        return frozenset()
    if isinstance(e, Sum):
        return frozenset().union(*(_free(x) for x in e.terms))
    if isinstance(e, Product):
        return frozenset().union(*(_free(x) for x in e.factors))
    if isinstance(e, Power):
        s = _free(e.base)
        if isinstance(e.exp, Expr):
            s = s | _free(e.exp)
        return s
    raise TypeError(f"not an expression: {e!r}")


# ---------------------------------------------------------------------------
# differentiation and substitution

def _dbase(b, v):
    if b == v:
        return {(): ONE}
    if isinstance(b, Opaque):
        if isinstance(v, Var) and v.name == "t":
            return {((Opaque(b.name, b.order + 1), ONE),): ONE}
        return {}
    if isinstance(b, Sum):
        return _pdiff(_poly(b), v)
    if isinstance(b, Power):
        if v in _free(b.exp):
            raise NotImplementedError("differentiating a symbolic exponent needs logarithms")
        if v not in _free(b.base):
            return {}
        lowered = Power(b.base, Sum((b.exp, Const(-1))))
        return _pmul(_pmul(_poly(b.exp), _poly(lowered)), _pdiff(_poly(b.base), v))
    return {}


def _pdiff(p, v):
    out = {}
    for mono, c in p.items():
        for i, (b, q) in enumerate(mono):
            db = _dbase(b, v)
            if not db:
                continue
            rest = mono[:i] + mono[i + 1:]
            if q != 1:
                rest, k = _mono_mul(rest, ((b, q - 1),))
            else:
                k = ONE
            out = _padd(out, _pmul({rest: c * q * k}, db))
    return out


def diff(e, v) -> Expr:
    """Formal partial derivative; ``d/dt`` maps ``p^(d)`` to ``p^(d+1)``."""
    return _from_poly(_pdiff(_poly(_coerce(e)), v))


def total_derivative(e) -> Expr:
    """``D_t = d/dt + Rdot d/dR + Rddot d/dRdot`` on an expression free of Rddot."""
    e = _coerce(e)
    if Rddot in free_symbols(e):
        raise ValueError("total_derivative expects an expression free of Rddot")
    p = _poly(e)
    out = _pdiff(p, t)
    out = _padd(out, _pmul({((Rdot, ONE),): ONE}, _pdiff(p, R)))
    out = _padd(out, _pmul({((Rddot, ONE),): ONE}, _pdiff(p, Rdot)))
    return _from_poly(out)


def _psubs(p, target, rp):
    out = {}
    for mono, c in p.items():
        acc = {(): c}
        for b, q in mono:
            nb = _subs_base(b, target, rp)
            if nb is None:
                acc = _pmul(acc, {((b, q),): ONE})
            else:
                acc = _pmul(acc, _ppow(nb, q))
            if not acc:
                break
        out = _padd(out, acc)
    return out


def _subs_base(b, target, rp):
    if b == target:
        return rp
    if target not in _free(b):
        return None
    if isinstance(b, Sum):
        return _psubs(_poly(b), target, rp)
    if isinstance(b, Power):
        rexpr = _from_poly(rp)
        base = substitute(b.base, target, rexpr)
        exp = substitute(b.exp, target, rexpr) if isinstance(b.exp, Expr) else b.exp
        return _poly(Power(base, exp))
    return None


def substitute(e, target, replacement) -> Expr:
    """Replace every occurrence of a symbol or opaque derivative, then normalize."""
    return _from_poly(_psubs(_poly(_coerce(e)), target, _poly(_coerce(replacement))))


def substitute_many(e, mapping: Mapping) -> Expr:
    out = _coerce(e)
    for target, repl in mapping.items():
        out = substitute(out, target, repl)
    return out


def collect(e, bases: Iterable) -> dict:
    """Split ``e`` by the exponents of ``bases``.

    Returns ``{exponent tuple: coefficient Expr}`` so that
    ``e == sum(coef * prod(b**k))``; coefficients are free of every base.
    """
    bases = list(bases)
    index = {b: i for i, b in enumerate(bases)}
    groups = {}
    for mono, c in _poly(_coerce(e)).items():
        key = [ZERO] * len(bases)
        rest = []
        for b, q in mono:
            i = index.get(b)
            if i is None:
                if any(x in _free(b) for x in bases):
                    raise ValueError(f"base hidden inside {render(b)}; cannot collect")
                rest.append((b, q))
            else:
                key[i] = q
        key = tuple(int(k) if k.denominator == 1 else k for k in key)
        g = groups.setdefault(key, {})
        m = tuple(rest)
        v = g.get(m, ZERO) + c
        if v:
            g[m] = v
        else:
            g.pop(m, None)
    return {k: _from_poly(g) for k, g in sorted(groups.items(), key=lambda kv: kv[0]) if g}


# ---------------------------------------------------------------------------
# numeric evaluation

def _binding_name(k) -> str:
    if isinstance(k, str):
        return k
    if isinstance(k, (Symbol, Opaque)):
        return render(k)
    raise TypeError(f"bad binding key {k!r}")


def _num_pow(b: float, q) -> float:
    if isinstance(q, Fraction) and q.denominator == 1:
        n = int(q)
        if b == 0 and n < 0:
            raise DomainError("zero raised to a negative power")
        return b ** n
    qf = float(q)
    if b < 0:
        raise DomainError(f"negative base {b} with non-integer exponent {q}")
    if b == 0:
        if qf < 0:
            raise DomainError("zero raised to a negative power")
        return 0.0
    return math.exp(qf * math.log(b))


def evaluate(e, bindings: Mapping, forcing=None) -> float:
    """IEEE double value of ``e``.

    ``bindings`` maps symbols (or their names) to numbers. Opaque ``p^(d)(t)``
    resolves through ``forcing.derivative(t, d)`` unless bound explicitly.
    """
    env = {_binding_name(k): float(v) for k, v in bindings.items()}
    return _eval(_coerce(e), env, forcing)


def _eval(e, env, forcing):
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Symbol):
        try:
            return env[e.name]
        except KeyError:
            raise UnboundSymbolError(e.name) from None
    if isinstance(e, Opaque):
        key = render(e)
        if key in env:
            return env[key]
        if forcing is None:
            raise UnboundSymbolError(key)
        if "t" not in env:
            raise UnboundSymbolError("t")
        return float(forcing.derivative(env["t"], e.order))
    if isinstance(e, Sum):
        return math.fsum(_eval(x, env, forcing) for x in e.terms)
    if isinstance(e, Product):
        out = 1.0
        for f in e.factors:
            out *= _eval(f, env, forcing)
        return out
    if isinstance(e, Power):
        q = e.exp
        if isinstance(q, Expr):
            q = _eval(q, env, forcing)
            if float(q).is_integer():
                q = Fraction(int(q))
        return _num_pow(_eval(e.base, env, forcing), q)
    raise TypeError(f"not an expression: {e!r}")


def lambdify(e, names: Iterable[str], forcing=None) -> Callable:
    """Compile ``e`` into ``f(*values)`` working on floats or numpy arrays.

    Names are matched to symbols by their rendered form; opaque derivatives
    go through ``forcing`` and need ``t`` among ``names``. No domain checks:
    invalid points yield nan.
    """
    import numpy as np

    names = list(names)
    pos = {n: i for i, n in enumerate(names)}

    def build(node):
        if isinstance(node, Const):
            v = float(node.value)
            return lambda args: v
        if isinstance(node, Symbol):
            if node.name not in pos:
                raise UnboundSymbolError(node.name)
            i = pos[node.name]
            return lambda args: args[i]
        if isinstance(node, Opaque):
            key = render(node)
            if key in pos:
                i = pos[key]
                return lambda args: args[i]
            if forcing is None or "t" not in pos:
                raise UnboundSymbolError(key)
            it, order = pos["t"], node.order
            return lambda args: forcing.derivative(args[it], order)
        if isinstance(node, Sum):
            parts = [build(x) for x in node.terms]
            return lambda args: sum(f(args) for f in parts)
        if isinstance(node, Product):
            parts = [build(x) for x in node.factors]

            def prod(args):
                out = 1.0
                for f in parts:
                    out = out * f(args)
                return out
            return prod
        if isinstance(node, Power):
            fb = build(node.base)
            q = node.exp
            if isinstance(q, Expr):
                fq = build(q)
                return lambda args: np.power(fb(args), fq(args))
            if q.denominator == 1:
                n = int(q)
                if n == 2:
                    return lambda args: fb(args) * fb(args)
                return lambda args: fb(args) ** n if n > 0 else 1.0 / fb(args) ** (-n)
            qf = float(q)
            return lambda args: np.power(fb(args), qf)
        raise TypeError(f"not an expression: {node!r}")

    f = build(_coerce(e))
    return lambda *values: f(values)


# ---------------------------------------------------------------------------
# rendering (inverse of the parser)

_SUM, _PROD, _POW = 1, 2, 3


def render(e) -> str:
    return _render(_coerce(e), 0)


def _render(e, prec):
    if isinstance(e, Const):
        s = str(e.value)
        if (e.value < 0 and prec >= _PROD) or (e.value.denominator != 1 and prec >= _POW):
            return f"({s})"
        return s
    if isinstance(e, Symbol):
        return e.name
    if isinstance(e, Opaque):
        return f"{e.name}{chr(39) * e.order}(t)"
    if isinstance(e, Sum):
        parts = []
        for i, term in enumerate(e.terms):
            s = _render(term, _SUM)
            if i and s.startswith("-"):
                parts.append(" - " + s[1:])
            elif i:
                parts.append(" + " + s)
            else:
                parts.append(s)
        s = "".join(parts)
        return f"({s})" if prec > _SUM else s
    if isinstance(e, Product):
        factors = list(e.factors)
        sign = ""
        if factors and isinstance(factors[0], Const) and factors[0].value == -1 and len(factors) > 1:
            sign = "-"
            factors = factors[1:]
        body = []
        for i, f in enumerate(factors):
            if i == 0 and isinstance(f, Const) and f.value < 0:
                body.append(str(f.value))
            else:
                body.append(_render(f, _PROD + (1 if i else 0)))
        s = sign + "*".join(body)
        return f"({s})" if prec > _PROD or (prec == _PROD and s.startswith("-")) else s
    if isinstance(e, Power):
        base = _render(e.base, _POW + 1)
        q = e.exp
        if isinstance(q, Expr):
            exp = f"({_render(q, 0)})"
        elif q.denominator == 1 and q >= 0:
            exp = str(q)
        else:
            exp = f"({q})"
        s = f"{base}^{exp}"
        return f"({s})" if prec > _POW else s
    raise TypeError(f"not an expression: {e!r}")
