"""Exact arithmetic in the Q-span of square roots of square-free integers.

Reeb vectors of non-degenerate toric contact forms have rationally
independent coordinates, so they cannot be rational.  Values of the form
``q_0 + sum_p q_p sqrt(p)`` (rational ``q``, distinct square-free ``p > 1``)
form a Q-vector space in which ``1`` and the ``sqrt(p)`` are linearly
independent.  That makes zero tests and rational-dependence tests exact, and
signs are decided by rational enclosures of increasing precision.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Union

import sympy

Number = Union[int, Fraction, "LinearSurd"]


def _squarefree_part(m: int) -> tuple[int, int]:
    """``m = s * r**2`` with ``s`` square-free; returns ``(s, r)``."""
    if m <= 0:
        raise ValueError("radicand must be positive")
    s, r = 1, 1
    for p, e in sympy.factorint(m).items():
        r *= p ** (e // 2)
        if e % 2:
            s *= p
    return s, r


@total_ordering
class LinearSurd:
    """``sum_p coeffs[p] * sqrt(p)`` with ``p = 1`` standing for the rational part."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[int, Fraction] | None = None):
        self.coeffs: dict[int, Fraction] = {p: Fraction(c) for p, c in (coeffs or {}).items() if c != 0}

    # -- construction ----------------------------------------------------------

    @classmethod
    def coerce(cls, x: Number | str) -> "LinearSurd":
        if isinstance(x, LinearSurd):
            return x
        if isinstance(x, str):
            return cls.parse(x)
        if isinstance(x, float):
            raise TypeError("floats are not exact; pass a Fraction or a string")
        return cls({1: Fraction(x)})

    @classmethod
    def sqrt(cls, m: int, scale: Fraction | int = 1) -> "LinearSurd":
        s, r = _squarefree_part(int(m))
        return cls({s: Fraction(scale) * r})

    @classmethod
    def parse(cls, text: str) -> "LinearSurd":
        """Parse ``"3/2"``, ``"1 + sqrt(2)/100"`` and similar expressions."""
        expr = sympy.nsimplify(sympy.sympify(text, rational=True), rational=True)
        return cls.from_sympy(sympy.expand(expr))

    @classmethod
    def from_sympy(cls, expr) -> "LinearSurd":
        out: dict[int, Fraction] = {}
        for term in sympy.Add.make_args(sympy.expand(expr)):
            coeff, rest = term.as_coeff_Mul()
            if not coeff.is_Rational:
                raise ValueError(f"not a rational combination of square roots: {expr}")
            if rest == 1:
                p = 1
            elif isinstance(rest, sympy.Pow) and rest.exp == sympy.Rational(1, 2) and rest.base.is_Integer:
                p, r = _squarefree_part(int(rest.base))
                coeff = coeff * r
            else:
                raise ValueError(f"not a rational combination of square roots: {expr}")
            out[p] = out.get(p, Fraction(0)) + Fraction(int(coeff.p), int(coeff.q))
        return cls(out)

    # -- queries ---------------------------------------------------------------

    def is_rational(self) -> bool:
        return all(p == 1 for p in self.coeffs)

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        return self.coeffs.get(1, Fraction(0))

    def radicands(self) -> set[int]:
        return set(self.coeffs)

    def bounds(self, digits: int = 30) -> tuple[Fraction, Fraction]:
        """Rigorous rational enclosure from integer square roots."""
        scale = 10**digits
        lo = hi = Fraction(0)
        for p, c in self.coeffs.items():
            if p == 1:
                lo += c
                hi += c
                continue
            r = math.isqrt(p * scale * scale)
            s_lo, s_hi = Fraction(r, scale), Fraction(r + 1, scale)
            if c > 0:
                lo += c * s_lo
                hi += c * s_hi
            else:
                lo += c * s_hi
                hi += c * s_lo
        return lo, hi

    def sign(self) -> int:
        """Exact sign: zero iff all coefficients vanish, otherwise by enclosure."""
        if not self.coeffs:
            return 0
        digits = 30
        while True:
            lo, hi = self.bounds(digits)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            digits *= 2
            if digits > 20_000:  # pragma: no cover - astronomically close to zero
                raise ArithmeticError(f"cannot decide the sign of {self}")

    def __float__(self) -> float:
        return float(sum(float(c) * (math.sqrt(p) if p != 1 else 1.0) for p, c in self.coeffs.items()))

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other: Number) -> "LinearSurd":
        other = LinearSurd.coerce(other)
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            out[p] = out.get(p, Fraction(0)) + c
        return LinearSurd(out)

    __radd__ = __add__

    def __neg__(self) -> "LinearSurd":
        return LinearSurd({p: -c for p, c in self.coeffs.items()})

    def __sub__(self, other: Number) -> "LinearSurd":
        return self + (-LinearSurd.coerce(other))

    def __rsub__(self, other: Number) -> "LinearSurd":
        return LinearSurd.coerce(other) - self

    def __mul__(self, other: int | Fraction) -> "LinearSurd":
        if isinstance(other, LinearSurd):
            if other.is_rational():
                other = other.rational()
            elif self.is_rational():
                return other * self.rational()
            else:
                raise TypeError("product of two irrational surds leaves the linear span")
        if isinstance(other, float):
            raise TypeError("floats are not exact")
        f = Fraction(other)
        return LinearSurd({p: c * f for p, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __truediv__(self, other: int | Fraction) -> "LinearSurd":
        if isinstance(other, LinearSurd):
            other = other.rational()
        return self * (1 / Fraction(other))

    def __eq__(self, other: object) -> bool:
        try:
            o = LinearSurd.coerce(other)  # type: ignore[arg-type]
        except (TypeError, ValueError):
            return NotImplemented
        return (self - o).coeffs == {}

    def __lt__(self, other: Number) -> bool:
        return (self - LinearSurd.coerce(other)).sign() < 0

    def __hash__(self) -> int:
        return hash(frozenset(self.coeffs.items()))

    def __repr__(self) -> str:
        return f"LinearSurd({self})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for p in sorted(self.coeffs):
            c = self.coeffs[p]
            if p == 1:
                parts.append(str(c))
            elif c == 1:
                parts.append(f"sqrt({p})")
            elif c.denominator == 1:
                parts.append(f"{c.numerator}*sqrt({p})")
            elif c.numerator == 1:
                parts.append(f"sqrt({p})/{c.denominator}")
            else:
                parts.append(f"{c.numerator}*sqrt({p})/{c.denominator}")
        return " + ".join(parts).replace("+ -", "- ")


def rank_over_q(values: Iterable[LinearSurd]) -> int:
    """Dimension of the Q-span of ``values``."""
    vals = list(values)
    keys = sorted(set().union(*(v.radicands() for v in vals))) if vals else []
    if not keys:
        return 0
    mat = sympy.Matrix([[sympy.Rational(v.coeffs.get(p, 0).numerator, v.coeffs.get(p, 0).denominator) for p in keys] for v in vals])
    return int(mat.rank())


def proportional(a: LinearSurd, b: LinearSurd) -> bool:
    """Whether ``a / b`` is rational (``b != 0``)."""
    return rank_over_q([a, b]) <= 1


class SurdRatio:
    """``num / den`` with ``den > 0``: a rotation number.

    Supports exactly what the index rule needs: integer multiples, integer
    shifts, floors, integrality tests and comparison with rationals.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Number, den: Number = 1):
        num, den = LinearSurd.coerce(num), LinearSurd.coerce(den)
        s = den.sign()
        if s == 0:
            raise ZeroDivisionError("zero denominator")
        if s < 0:
            num, den = -num, -den
        self.num, self.den = num, den

    def __mul__(self, k: int | Fraction) -> "SurdRatio":
        return SurdRatio(self.num * k, self.den)

    __rmul__ = __mul__

    def __add__(self, q: int | Fraction) -> "SurdRatio":
        return SurdRatio(self.num + self.den * Fraction(q), self.den)

    __radd__ = __add__

    def __sub__(self, q: int | Fraction) -> "SurdRatio":
        return self + (-Fraction(q))

    def compare(self, q: int | Fraction) -> int:
        """Sign of ``self - q``."""
        return (self.num - self.den * Fraction(q)).sign()

    def floor(self) -> int:
        m = math.floor(float(self))
        while self.compare(m) < 0:
            m -= 1
        while self.compare(m + 1) >= 0:
            m += 1
        return m

    def is_integer(self) -> bool:
        m = self.floor()
        return self.compare(m) == 0

    def is_rational(self) -> bool:
        return proportional(self.num, self.den) if self.num else True

    def __float__(self) -> float:
        return float(self.num) / float(self.den)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SurdRatio):
            if other.den == self.den:
                return self.num == other.num
            if other.den.is_rational() and self.den.is_rational():
                return self.num * other.den.rational() == other.num * self.den.rational()
            return NotImplemented
        if isinstance(other, (int, Fraction)):
            return self.compare(other) == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash(round(float(self), 9))

    def __repr__(self) -> str:
        return f"SurdRatio({self})"

    def __str__(self) -> str:
        if self.den == 1:
            return str(self.num)
        return f"({self.num}) / ({self.den})"
