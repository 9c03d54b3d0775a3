"""Exact integer linear algebra on small lattices (thin wrappers over sympy)."""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors, smith_normal_decomp

from .surd import LinearSurd


def gcd_all(v: Sequence[int]) -> int:
    return reduce(math.gcd, (abs(int(x)) for x in v), 0)


def primitive(v: Sequence[int]) -> tuple[int, ...]:
    g = gcd_all(v)
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return tuple(int(x) // g for x in v)


def rank(rows: Sequence[Sequence[int]]) -> int:
    if not rows:
        return 0
    return int(Matrix(rows).rank())


def kernel_direction(rows: Sequence[Sequence[int]]) -> tuple[int, ...] | None:
    """Primitive generator of the common kernel of ``n`` rows in ``Z^{n+1}``.

    Signed maximal minors (the generalised cross product); ``None`` if the
    rows are dependent.
    """
    m = Matrix(rows)
    k = m.shape[1]
    cof = [(-1) ** i * m[:, [c for c in range(k) if c != i]].det() for i in range(k)]
    if all(c == 0 for c in cof):
        return None
    return primitive([int(c) for c in cof])


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), 0)


def nontrivial_factors(rows: Sequence[Sequence[int]]) -> tuple[int, ...]:
    """Invariant factors different from one (zeros included)."""
    if not rows:
        return ()
    facs = invariant_factors(Matrix(rows), domain=ZZ)
    out = [abs(int(f)) for f in facs if abs(int(f)) != 1]
    r = min(len(rows), len(rows[0]))
    out += [0] * (r - len(facs))
    return tuple(out)


def basis_completion(rows: Sequence[Sequence[int]]) -> tuple[int, ...] | None:
    """A vector completing ``n`` rows of ``Z^{n+1}`` to a lattice basis.

    ``None`` if the rows do not extend to a basis.
    """
    m = Matrix(rows)
    s, _, v = smith_normal_decomp(m, domain=ZZ)
    if any(abs(s[i, i]) != 1 for i in range(m.shape[0])):
        return None
    w = v.inv()
    return tuple(int(x) for x in w[m.shape[0], :])


def solve_lattice(columns: Sequence[Sequence[int]], rhs: Sequence) -> tuple[list, bool]:
    """Canonical solution ``x`` of ``sum_i x_i columns[i] = rhs``.

    With ``U M V = S`` the Smith decomposition of the matrix ``M`` whose
    columns are ``columns``, the solution is ``V z`` where ``z_i =
    (U rhs)_i / s_i`` and the coordinates of ``z`` beyond the rank vanish.
    ``rhs`` may contain integers, fractions or :class:`LinearSurd` values.
    Returns the solution and whether it is integral.

    Raises
    ------
    ValueError
        If the system has no solution.
    """
    m = Matrix(columns).T
    s, u, v = smith_normal_decomp(m, domain=ZZ)
    rows, cols = m.shape
    rhs = [LinearSurd.coerce(x) for x in rhs]
    uy = [sum((rhs[j] * int(u[i, j]) for j in range(rows)), LinearSurd()) for i in range(rows)]
    z: list[LinearSurd] = [LinearSurd() for _ in range(cols)]
    for i in range(rows):
        si = int(s[i, i]) if i < cols else 0
        if si == 0:
            if uy[i]:
                raise ValueError("right-hand side is not in the span of the columns")
            continue
        z[i] = uy[i] / si
    x = [sum((z[k] * int(v[i, k]) for k in range(cols)), LinearSurd()) for i in range(cols)]
    integral = all(c.is_rational() and c.rational().denominator == 1 for c in x)
    return x, integral


def as_fraction(x: LinearSurd) -> Fraction:
    return x.rational()
