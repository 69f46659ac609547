"""Seeded random expressions over the jet variables, shared by several tests."""

import random
from fractions import Fraction

from rpkit.symbolic import Const, P, Param, Power, R, Rdot, Sum, t
from rpkit.symbolic.expr import Product

BASES = [t, R, Rdot, Param("Th"), Param("We"), P]
EXPONENTS = [Fraction(n, d) for n, d in [(1, 1), (2, 1), (3, 1), (-1, 1), (-2, 1), (1, 2), (-3, 2), (5, 3), (-1, 3)]]
# Positive integer powers of sums would expand and swell.
NESTED_EXPONENTS = [q for q in EXPONENTS if q.denominator != 1 or q < 0]
BINDINGS = {"t": 0.7, "R": 1.3, "Rdot": 0.45, "Th": 1.1, "We": 0.6}
VARIABLES = ["t", "R", "Rdot"]


def random_expr(rng: random.Random, depth: int = 1, positive: bool = False):
    """A sum of 1 to 4 monomials; nested sums stay positive at ``BINDINGS``."""
    terms = []
    for _ in range(rng.randint(1, 4)):
        num = rng.randint(1, 9) if positive else (rng.randint(-9, 9) or 1)
        factors = [Const(Fraction(num, rng.randint(1, 5)))]
        for _ in range(rng.randint(1, 3)):
            if depth > 0 and rng.random() < 0.15:
                base = Sum((random_expr(rng, depth - 1, positive=True), Const(3)))
                factors.append(Power(base, rng.choice(NESTED_EXPONENTS)))
            else:
                factors.append(Power(rng.choice(BASES), rng.choice(EXPONENTS)))
        terms.append(Product(tuple(factors)))
    return Sum(tuple(terms))


def corpus(n: int = 100, seed: int = 20240501):
    rng = random.Random(seed)
    return [random_expr(rng) for _ in range(n)]


class QuadraticForcing:
    """p(t) = 2 + t^2 for the evaluation of opaque derivatives."""

    def value(self, t):
        return 2.0 + t * t

    def derivative(self, t, order=1):
        return [2.0 + t * t, 2.0 * t, 2.0][order] if order <= 2 else 0.0


FORCING = QuadraticForcing()
