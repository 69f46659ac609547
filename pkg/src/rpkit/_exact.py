"""Exact rational linear algebra for small homogeneous systems."""

from __future__ import annotations

from fractions import Fraction


def rref(rows, ncols: int):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def nullspace(rows, ncols: int) -> list:
    """Canonical basis of {v : rows v = 0}.

    The basis is itself in reduced echelon form, so each vector's first
    nonzero entry is 1 and the result depends only on the subspace.
    """
    red, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [Fraction(0)] * ncols
        v[fcol] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[fcol]
        basis.append(v)
    return canonical_basis(basis, ncols)


def canonical_basis(vectors, ncols: int) -> list:
    red, _ = rref(vectors, ncols)
    return red
