"""Closed-form index arithmetic outside the toric setting.

* contact homology of prequantizations from Betti numbers of the base,
* the index of a perturbed Morse-Bott orbit,
* the free-homotopy multiples and Chern-number lower bounds,
* the index of the round linear flow ``H_R`` and the pinching estimate it
  implies through the Croke-Weinstein period bound.

Every quantity is exact.  Numbers may be given as ``int``, ``Fraction``,
sympy expressions or strings such as ``"2*pi*3"`` or ``"sqrt(2)"``; a float is
read as the binary rational it denotes, except in :func:`ind_hr`, where a
float ratio within ``1e-12`` of an integer counts as resonant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

import numpy as np
import sympy

from .errors import HypothesesNotMet, MorseIndexOutOfRange, PinchingViolated, SchemaError
from .sympath import SymplecticPath
from .toric import HCTable

Exact = Union[int, Fraction, str, float, sympy.Expr]

__all__ = [
    "PrequantizationData",
    "MultiplesUnknown",
    "prequant_hc",
    "projective_space_betti",
    "perturbed_orbit_index",
    "homotopy_multiples",
    "ChernBound",
    "chern_pairing_check",
    "PinchingData",
    "PinchingBound",
    "pinched_index_bound",
    "ind_hr",
    "hr_linear_path",
]


def _exact(x: Exact) -> sympy.Expr:
    if isinstance(x, sympy.Basic):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return sympy.Integer(x)
    if isinstance(x, float):
        f = Fraction(x)
        return sympy.Rational(f.numerator, f.denominator)
    if isinstance(x, Fraction):
        return sympy.Rational(x.numerator, x.denominator)
    if isinstance(x, str):
        try:
            return sympy.sympify(x, rational=True)
        except (sympy.SympifyError, TypeError) as exc:
            raise SchemaError(f"cannot parse number {x!r}") from exc
    raise TypeError(f"unsupported number type {type(x).__name__}")


def _is_positive(x: sympy.Expr) -> bool:
    val = sympy.simplify(x)
    if val.is_positive is None:
        raise SchemaError(f"cannot decide the sign of {x}")
    return bool(val.is_positive)


# ---------------------------------------------------------------------------
# prequantizations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrequantizationData:
    """A prequantization circle bundle over a closed symplectic base ``N``.

    Attributes
    ----------
    n : int
        Half the dimension of the base (the contact manifold has dimension ``2n + 1``).
    betti : tuple of int
        Betti numbers ``b_0 .. b_{2n}`` of ``N``.
    mu_phi : int
        Robbin-Salamon index of the simple fibre in the chosen trivialization.
    multiples : tuple of int or None
        Iterates ``k`` whose orbits lie in the free homotopy class (and below
        the action cutoff); ``None`` stands for every ``k >= 1``.
    m : int
        Order of the finite group ``G`` (``1`` when trivial).
    """

    n: int
    betti: tuple[int, ...]
    mu_phi: int
    multiples: tuple[int, ...] | None = None
    m: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "betti", tuple(int(b) for b in self.betti))
        if self.multiples is not None:
            object.__setattr__(self, "multiples", tuple(sorted({int(k) for k in self.multiples})))
        if self.n < 0:
            raise SchemaError("n must be non-negative")
        if any(b < 0 for b in self.betti):
            raise SchemaError("Betti numbers must be non-negative")
        if len(self.betti) > 2 * self.n + 1:
            raise SchemaError(f"a {2 * self.n}-dimensional base has at most {2 * self.n + 1} Betti numbers")
        if self.m < 1:
            raise SchemaError("group order m must be at least 1")
        if self.multiples is not None and (not self.multiples or self.multiples[0] < 1 or 1 not in self.multiples):
            raise SchemaError("multiples must be positive and contain 1")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "betti": list(self.betti),
            "mu_phi": self.mu_phi,
            "multiples": None if self.multiples is None else list(self.multiples),
            "m": self.m,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "PrequantizationData":
        allowed = {"n", "betti", "mu_phi", "multiples", "m"}
        if not isinstance(obj, dict) or not {"n", "betti", "mu_phi"} <= set(obj) or set(obj) - allowed:
            raise SchemaError(f"prequantization data needs keys n, betti, mu_phi (optional: multiples, m); got {obj!r}")
        return cls(int(obj["n"]), tuple(obj["betti"]), int(obj["mu_phi"]), obj.get("multiples"), int(obj.get("m", 1)))


def projective_space_betti(n: int) -> tuple[int, ...]:
    """Betti numbers of ``CP^n``: one in every even degree up to ``2n``."""
    return tuple(1 - (i % 2) for i in range(2 * n + 1))


def prequant_hc(data: PrequantizationData, degree_range: tuple[int, int]) -> HCTable:
    """Contact homology ranks of a prequantization for degrees in ``degree_range``.

    The rank in degree ``d`` is ``sum_k betti[d + n - k mu_phi]`` over the
    multiples ``k``: every iterate of the fibre contributes a shifted copy of
    the homology of the base.

    Raises
    ------
    HypothesesNotMet
        If every iterate contributes and ``mu_phi <= 0`` (infinitely many
        copies would land in one degree).
    """
    lo, hi = (int(x) for x in degree_range)
    if hi < lo:
        raise SchemaError("empty degree range")
    n, mu = data.n, data.mu_phi
    support = [i for i, b in enumerate(data.betti) if b]
    if data.multiples is None:
        if mu <= 0 and support:
            raise HypothesesNotMet("every iterate contributes but mu_phi <= 0: ranks would be infinite")
        k_top = max(1, (hi + n) // mu + 1) if mu > 0 else 1
        ks: Iterable[int] = range(1, k_top + 1)
    else:
        ks = data.multiples
    ranks = {d: 0 for d in range(lo, hi + 1)}
    generators = []
    for k in ks:
        for i in support:
            d = k * mu - n + i
            generators.append((d, k, i))
            if lo <= d <= hi:
                ranks[d] += data.betti[i]
    if not support:
        k_minus = k_plus = None
    elif data.multiples is None:
        k_minus = mu - n + support[0]
        k_plus = None
    else:
        degrees = [d for d, _, _ in generators]
        k_minus, k_plus = min(degrees), max(degrees)
    return HCTable(
        ranks=ranks,
        k_minus=k_minus,
        k_plus=k_plus,
        cutoff=hi,
        generators=tuple(sorted(g for g in generators if lo <= g[0] <= hi)),
    )


def perturbed_orbit_index(ind_p: int, k: int, mu_phi_k: int, n: int) -> int:
    """CZ index of the orbit over a critical point ``p`` after a Morse perturbation.

    ``mu_phi_k - n + ind_p``, where ``mu_phi_k`` is the Robbin-Salamon index
    of the ``k``-th iterate of the fibre.

    Raises
    ------
    MorseIndexOutOfRange
        Unless ``0 <= ind_p <= 2n``.
    """
    if k < 1:
        raise SchemaError("iterate k must be positive")
    if not 0 <= ind_p <= 2 * n:
        raise MorseIndexOutOfRange(f"Morse index {ind_p} outside [0, {2 * n}]")
    return mu_phi_k - n + ind_p


@dataclass(frozen=True)
class MultiplesUnknown:
    """The multiples set exists but is not determined by the given data."""

    reason: str

    def to_json(self) -> dict:
        return {"unknown": True, "reason": self.reason}


def homotopy_multiples(
    m: int, omega_pi2_zero: bool, T: float, simply_connected: bool = False
) -> tuple[int, ...] | MultiplesUnknown:
    """Iterates of the fibre lying in its free homotopy class, below ``T``.

    ``(1,)`` when ``omega`` vanishes on ``pi_2`` of the base.  When the total
    space is simply connected every iterate is freely homotopic to the fibre
    and all ``k < T`` are returned.  Otherwise some ``k > 1`` belongs to the
    class but its value is not determined, and :class:`MultiplesUnknown` is
    returned so the caller supplies the set.
    """
    if m < 1:
        raise SchemaError("group order m must be at least 1")
    if not T > 1:
        raise SchemaError("action cutoff T must exceed 1")
    if omega_pi2_zero:
        return (1,)
    if simply_connected:
        return tuple(range(1, math.ceil(T)))
    return MultiplesUnknown("omega is non-zero on pi_2: some k > 1 lies in the class, the set must be supplied")


@dataclass(frozen=True)
class ChernBound:
    """Lower bound for the index of an iterate of the fibre over a sphere class."""

    omega_pairing: Fraction
    bound: int

    def to_json(self) -> dict:
        return {"omega_pairing": str(self.omega_pairing), "bound": self.bound}


def chern_pairing_check(m: int, k: int, minimal_chern: int, monotone: bool = True) -> ChernBound:
    """Bound ``mu_RS(phi^k) = 2 <c_1, S> >= 2 * minimal_chern`` for ``k`` in the class.

    The sphere ``S`` joining the fibre to its ``k``-th iterate has symplectic
    area ``(k - 1) / m > 0``; for a monotone base this makes ``<c_1, S>`` a
    positive multiple of the minimal Chern number.

    Raises
    ------
    HypothesesNotMet
        If the base is not declared monotone, or ``k = 1`` (no sphere).
    """
    if m < 1 or minimal_chern < 1:
        raise SchemaError("m and minimal_chern must be at least 1")
    if not monotone:
        raise HypothesesNotMet("the Chern bound needs a monotone base")
    if k <= 1:
        raise HypothesesNotMet("k = 1 bounds no sphere; the estimate applies to k > 1")
    pairing = Fraction(k - 1, m)
    return ChernBound(pairing, 2 * minimal_chern)


# ---------------------------------------------------------------------------
# round flows and pinching
# ---------------------------------------------------------------------------


def _hr_ratio(S: Exact, R: Exact) -> tuple[sympy.Expr, bool]:
    """``S / (2 pi R^2)`` and whether it is an integer."""
    if isinstance(S, float) or isinstance(R, float):
        x = float(S) / (2 * math.pi * float(R) ** 2)
        r = round(x)
        if abs(x - r) <= 1e-12 * max(1.0, abs(x)):
            return sympy.Integer(r), True
        return sympy.Float(x, 30), False
    s, r = _exact(S), _exact(R)
    x = sympy.nsimplify(sympy.simplify(s / (2 * sympy.pi * r**2)))
    return x, bool(x.is_integer)


def ind_hr(n: int, S: Exact, R: Exact) -> int:
    """Lower CZ index of the round flow of ``|x|^2 / 2R^2`` on ``R^{2n+2}`` over time ``S``.

    With ``x = S / (2 pi R^2)`` (the number of turns) the value is
    ``(2n+2) x - n - 1`` for integral ``x`` and ``(2n+2) floor(x) + n + 1``
    otherwise: each of the ``n + 1`` complex coordinates rotates ``x`` times.
    """
    if n < 0:
        raise SchemaError("n must be non-negative")
    if not (_is_positive(_exact(S)) and _is_positive(_exact(R))):
        raise SchemaError("S and R must be positive")
    x, resonant = _hr_ratio(S, R)
    if resonant:
        return (2 * n + 2) * int(x) - n - 1
    return (2 * n + 2) * int(sympy.floor(x)) + n + 1


def hr_linear_path(n: int, S: float, R: float) -> SymplecticPath:
    """The linearized round flow as a path in ``Sp(2n + 2)`` (time rescaled to ``[0, 1]``)."""
    turns = float(S) / float(R) ** 2
    return SymplecticPath.constant(turns * np.eye(2 * n + 2))


@dataclass(frozen=True)
class PinchingData:
    """An ``(r, R)``-pinched hypersurface in ``R^{2n+2}`` and a level ``k > 1``.

    ``allow_boundary`` admits ``R / r = sqrt(k / (k - 1))`` exactly, where the
    estimate holds for arbitrarily close strictly pinched perturbations.
    """

    n: int
    r: Exact
    R: Exact
    k: Exact
    allow_boundary: bool = False

    def __post_init__(self) -> None:
        if self.n < 0:
            raise SchemaError("n must be non-negative")
        r, R, k = _exact(self.r), _exact(self.R), _exact(self.k)
        if not (_is_positive(r) and _is_positive(R)):
            raise SchemaError("pinching radii must be positive")
        if _is_positive(r - R):
            raise SchemaError("pinching radii need r <= R")
        if not _is_positive(k - 1):
            raise SchemaError("pinching exponent k must exceed 1")

    @classmethod
    def from_json(cls, obj: dict) -> "PinchingData":
        allowed = {"n", "r", "R", "k", "allow_boundary"}
        if not isinstance(obj, dict) or not {"n", "r", "R", "k"} <= set(obj) or set(obj) - allowed:
            raise SchemaError(f"pinching data needs keys n, r, R, k (optional: allow_boundary); got {obj!r}")
        conv = lambda v: v if isinstance(v, (int, float)) else str(v)  # noqa: E731
        return cls(int(obj["n"]), conv(obj["r"]), conv(obj["R"]), conv(obj["k"]), bool(obj.get("allow_boundary", False)))


@dataclass(frozen=True)
class PinchingBound:
    """The pinching estimate with its intermediate quantities.

    Attributes
    ----------
    floor_k : int
        ``floor(k)``, the iterate the bound applies to.
    bound : int
        ``(2n+2) floor(k) - n``, the lower bound for the lower CZ index of the
        ``floor(k)``-th iterate in the contact structure.
    min_period : str
        Croke-Weinstein lower bound ``2 pi r^2`` for every period.
    floor_argument : str
        ``floor(k) r^2 / R^2``, the number of turns of the round comparison
        flow at the minimal period of the iterate; exceeds ``floor(k) - 1``.
    ind_hr_value : int
        :func:`ind_hr` at ``S = 2 pi r^2 floor(k)`` and radius ``R``.
    full_space_bound : int
        ``(2n+2) floor(k) - n - 1``, the bound in ``R^{2n+2}``.
    xi_correction : int
        ``-1``: the lower index of the full-space path is the lower index of
        its contact part minus one (the radial/Hamiltonian plane is constant).
    boundary : bool
        Whether the pinching ratio sat exactly on the threshold.
    """

    n: int
    floor_k: int
    bound: int
    min_period: str
    floor_argument: str
    ind_hr_value: int
    full_space_bound: int
    xi_correction: int = -1
    boundary: bool = False
    threshold: str = field(default="")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "floor_k": self.floor_k,
            "bound": self.bound,
            "min_period": self.min_period,
            "floor_argument": self.floor_argument,
            "ind_hr_value": self.ind_hr_value,
            "full_space_bound": self.full_space_bound,
            "xi_correction": self.xi_correction,
            "boundary": self.boundary,
            "threshold": self.threshold,
        }


def pinched_index_bound(data: PinchingData) -> PinchingBound:
    """Index growth of iterates on an ``(r, R)``-pinched convex hypersurface.

    Every period is at least ``2 pi r^2``; comparing the flow with the round
    flow of radius ``R`` over ``floor(k)`` periods and using
    ``floor(k) r^2 / R^2 > floor(k) - 1`` bounds the lower index of the
    ``floor(k)``-th iterate by ``(2n+2) floor(k) - n``.

    Raises
    ------
    PinchingViolated
        If ``R / r >= sqrt(k / (k - 1))`` (equality allowed with
        ``allow_boundary``).
    """
    n = data.n
    r, R, k = _exact(data.r), _exact(data.R), _exact(data.k)
    ratio_sq = sympy.simplify((R / r) ** 2)
    thr_sq = sympy.simplify(k / (k - 1))
    gap = sympy.simplify(thr_sq - ratio_sq)
    on_boundary = gap == 0
    if not on_boundary and not _is_positive(gap):
        raise PinchingViolated(f"R/r = {sympy.sqrt(ratio_sq)} >= sqrt(k/(k-1)) = {sympy.sqrt(thr_sq)}")
    if on_boundary and not data.allow_boundary:
        raise PinchingViolated(f"R/r equals sqrt(k/(k-1)) = {sympy.sqrt(thr_sq)}; strict pinching required")
    fk = int(sympy.floor(k))
    turns = sympy.nsimplify(sympy.simplify(fk * r**2 / R**2))
    value = ind_hr(n, 2 * sympy.pi * r**2 * fk, R)
    full = (2 * n + 2) * fk - n - 1
    if not on_boundary and value < full:  # pragma: no cover - arithmetic guard
        raise HypothesesNotMet(f"comparison index {value} below {full}")
    return PinchingBound(
        n=n,
        floor_k=fk,
        bound=full + 1,
        min_period=str(sympy.simplify(2 * sympy.pi * r**2)),
        floor_argument=str(turns),
        ind_hr_value=value,
        full_space_bound=full,
        boundary=on_boundary,
        threshold=str(sympy.sqrt(thr_sq)),
    )
