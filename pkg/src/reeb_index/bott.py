"""Bott's index function on the unit circle and what is derived from it.

``Gamma(z)`` is the ``z``-twisted crossing index of the lower perturbation
``Gamma_eps`` of the path (the same perturbation that defines
:func:`~reeb_index.index.cz_minus`).  For ``z != 1`` it is the sum of the
crossing-form signatures at the parameters where ``Gamma_eps(t) - z I`` is
singular; ``Gamma_eps(1)`` has no eigenvalue ``z`` and ``Gamma_eps(0) = I``
contributes nothing.  At ``z = 1`` it is the lower index itself.  With this
normalisation the iteration formula

    cz_minus(path^k) = sum over z^k = 1 of Gamma(z)

holds for every ``k``, and the value at a discontinuity is the
lower-semicontinuous one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._crossings import SouriauTracker
from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import EngineDisagreement, EpsilonSelectionFailure, GapTooSmall
from .errors import NotAUnitEigenvalue
from .index import _perturbed_flow, cz_minus, cz_plus, lower_shift
from .sympath import SymplecticPath, classify_spectrum, iterate_path

__all__ = [
    "BottFunction",
    "SplittingData",
    "EllipticityVerdict",
    "bott_value",
    "bott_values",
    "bott_function",
    "unit_eigen_angles",
    "splitting_numbers",
    "all_splitting_numbers",
    "bott_iteration_sum",
    "elliptic_certificate",
]

TWO_PI = 2.0 * math.pi


def _tol(path: SymplecticPath, tol: Tolerances | None) -> Tolerances:
    return tol if tol is not None else DEFAULT_TOLERANCES


def _wrap(theta: float) -> float:
    t = math.fmod(theta, TWO_PI)
    return t + TWO_PI if t < 0 else t


def _circ_dist(a: float, b: float) -> float:
    d = abs(_wrap(a) - _wrap(b))
    return min(d, TWO_PI - d)


def unit_eigen_angles(path: SymplecticPath, tol: Tolerances | None = None) -> list[float]:
    """Sorted arguments in ``[0, 2 pi)`` of the unit eigenvalues of ``Gamma(1)``."""
    tol = _tol(path, tol)
    spec = classify_spectrum(path.endpoint(), tol)
    out: list[float] = []
    for c in spec.unit_eigenvalues(tol.eig_tol):
        th = _wrap(math.atan2(c.value.imag, c.value.real))
        if th > TWO_PI - tol.cluster_tol:
            th = 0.0
        if not any(_circ_dist(th, o) <= tol.cluster_tol for o in out):
            out.append(th)
    return sorted(out)


# ---------------------------------------------------------------------------
# twisted indices
# ---------------------------------------------------------------------------


class _TwistedEvaluator:
    """Twisted indices of the perturbed flows ``Gamma_eps`` for many ``z``.

    One :class:`SouriauTracker` per ``eps`` is built lazily and reused for
    every ``z``; all ``eps`` are ``base / 2**m`` so that trackers are shared.
    """

    def __init__(self, path: SymplecticPath, tol: Tolerances, method: str = "auto"):
        self.path = path
        self.tol = tol
        self.method = method
        self.base = lower_shift(path, tol)
        self.angles = unit_eigen_angles(path, tol)
        self._scanners: dict[int, SouriauTracker] = {}

    def _scanner(self, level: int) -> SouriauTracker:
        if level not in self._scanners:
            flow = _perturbed_flow(self.path, self.base / 2**level, self.method)
            self._scanners[level] = SouriauTracker(flow, self.tol)
        return self._scanners[level]

    def start_level(self, theta: float) -> int:
        # the perturbation moves eigenvalues by roughly 2 pi eps; keep that
        # well below the distance from z to the spectrum
        dists = [_circ_dist(theta, a) for a in self.angles]
        dists = [d for d in dists if d > self.tol.cluster_tol]
        if not dists:
            return 0
        target = 0.25 * min(dists) / TWO_PI
        level = 0
        while self.base / 2**level > target and self.base / 2**level > self.tol.eps_floor:
            level += 1
        return level

    def at_level(self, theta: float, level: int) -> int | None:
        w = complex(math.cos(theta), math.sin(theta))
        res = self._scanner(level).index(w)
        if res.end_dim or res.value.denominator != 1:
            return None
        return int(res.value)

    def value(self, theta: float) -> int:
        level = self.start_level(theta)
        max_level = level + 1 + max(4, int(math.ceil(math.log2(max(self.base, 1e-300) / self.tol.eps_floor))) + 4)
        cur = self.at_level(theta, level)
        while level < max_level:
            nxt = self.at_level(theta, level + 1)
            if cur is not None and nxt == cur:
                return cur
            level += 1
            cur = nxt
        raise EpsilonSelectionFailure(f"twisted index at angle {theta:.9g} did not stabilise")


def bott_values(
    path: SymplecticPath, angles: list[float] | np.ndarray, tol: Tolerances | None = None
) -> list[int]:
    """``Gamma(e^{i theta})`` for several angles, sharing the perturbed flows.

    Angles within ``1e-12`` of a multiple of ``2 pi`` are evaluated as
    ``z = 1``, i.e. as :func:`~reeb_index.index.cz_minus`.
    """
    tol = _tol(path, tol)
    ev = _TwistedEvaluator(path, tol)
    cache: dict[float, int] = {}
    out = []
    for th in angles:
        th = _wrap(float(th))
        if th < 1e-12 or TWO_PI - th < 1e-12:
            th = 0.0
        if th not in cache:
            cache[th] = cz_minus(path, tol) if th == 0.0 else ev.value(th)
        out.append(cache[th])
    return out


def bott_value(path: SymplecticPath, z: complex, tol: Tolerances | None = None) -> int:
    """Bott's index function ``Gamma(z)`` at a unit complex number ``z``.

    Raises
    ------
    ValueError
        If ``|z|`` differs from one by more than ``1e-9``.
    """
    z = complex(z)
    if abs(abs(z) - 1.0) > 1e-9:
        raise ValueError(f"|z| must be 1, got {abs(z)}")
    return bott_values(path, [math.atan2(z.imag, z.real)], tol)[0]


def bott_iteration_sum(path: SymplecticPath, k: int, tol: Tolerances | None = None) -> int:
    """Right-hand side of Bott's formula, ``sum_{z^k = 1} Gamma(z)``.

    The roots of unity are taken at the exact angles ``2 pi l / k``.
    """
    if k < 1:
        raise ValueError("k must be positive")
    return sum(bott_values(path, [TWO_PI * l / k for l in range(k)], tol))


# ---------------------------------------------------------------------------
# Bott function
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BottFunction:
    """Piecewise constant ``Gamma`` on the unit circle.

    ``arc_values[i]`` is the value on the open arc from ``breakpoints[i]`` to
    ``breakpoints[i+1]`` (cyclically); ``point_values[i]`` is the value at
    ``breakpoints[i]``.  Without breakpoints there is a single arc and
    ``value_at_one`` carries ``Gamma(1)``.
    """

    breakpoints: tuple[float, ...]
    arc_values: tuple[int, ...]
    point_values: tuple[int, ...]
    value_at_one: int

    def __call__(self, theta: float) -> int:
        th = _wrap(theta)
        if th == 0.0:
            return self.value_at_one
        bps = self.breakpoints
        if not bps:
            return self.arc_values[0]
        for b, v in zip(bps, self.point_values):
            if abs(th - b) <= 1e-12:
                return v
        i = int(np.searchsorted(bps, th)) - 1  # -1 wraps to the last arc
        return self.arc_values[i]

    def arc_lengths(self) -> list[float]:
        bps = list(self.breakpoints)
        if not bps:
            return [TWO_PI]
        return [((bps[(i + 1) % len(bps)] - b) % TWO_PI) or TWO_PI for i, b in enumerate(bps)]

    def mean(self) -> float:
        """``(1 / 2 pi) * integral of Gamma``: the mean index."""
        return sum(v * l for v, l in zip(self.arc_values, self.arc_lengths())) / TWO_PI

    def to_json(self) -> dict:
        return {
            "breakpoints": [float(b) for b in self.breakpoints],
            "arc_values": [int(v) for v in self.arc_values],
            "point_values": [int(v) for v in self.point_values],
        }


def bott_function(path: SymplecticPath, tol: Tolerances | None = None) -> BottFunction:
    """Assemble ``Gamma`` from its values at breakpoints, arc midpoints and ``z = 1``."""
    tol = _tol(path, tol)
    bps = unit_eigen_angles(path, tol)
    if bps:
        mids = []
        for i, b in enumerate(bps):
            nb = bps[(i + 1) % len(bps)]
            length = ((nb - b) % TWO_PI) or TWO_PI
            mids.append(_wrap(b + 0.5 * length))
    else:
        mids = [math.pi]
    vals = bott_values(path, [0.0] + bps + mids, tol)
    at_one = vals[0]
    points = tuple(vals[1 : 1 + len(bps)])
    arcs = tuple(vals[1 + len(bps) :])
    return BottFunction(tuple(bps), arcs, points, at_one)


# ---------------------------------------------------------------------------
# splitting numbers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplittingData:
    """Splitting numbers of one unit eigenvalue ``z = e^{i theta}``."""

    theta: float
    S_plus: int
    S_minus: int
    nu: int
    m: int

    def to_json(self) -> dict:
        return {"theta": self.theta, "S_plus": self.S_plus, "S_minus": self.S_minus, "nu": self.nu, "m": self.m}


def _multiplicities(path: SymplecticPath, theta: float, tol: Tolerances) -> tuple[int, int] | None:
    spec = classify_spectrum(path.endpoint(), tol)
    for c in spec.unit_eigenvalues(tol.eig_tol):
        if _circ_dist(math.atan2(c.value.imag, c.value.real), theta) <= tol.cluster_tol:
            return c.geometric, c.algebraic
    return None


def splitting_numbers(path: SymplecticPath, z: complex, tol: Tolerances | None = None) -> SplittingData:
    """``S+-(z) = Gamma(e^{+-i eps} z) - Gamma(z)`` for a unit eigenvalue ``z``.

    ``eps`` is half the distance from ``z`` to the nearest other breakpoint
    (at most ``0.5``).

    Raises
    ------
    NotAUnitEigenvalue
        If ``z`` is not an eigenvalue of ``Gamma(1)`` on the unit circle.
    GapTooSmall
        If that half distance is below ``tol.splitting_floor``.
    """
    tol = _tol(path, tol)
    z = complex(z)
    theta = _wrap(math.atan2(z.imag, z.real))
    if abs(abs(z) - 1.0) > tol.eig_tol:
        raise NotAUnitEigenvalue(f"|z| = {abs(z)} is not 1")
    mult = _multiplicities(path, theta, tol)
    if mult is None:
        raise NotAUnitEigenvalue(f"e^(i {theta:.9g}) is not an eigenvalue of the endpoint")
    others = [a for a in unit_eigen_angles(path, tol) if _circ_dist(a, theta) > tol.cluster_tol]
    gap = min((_circ_dist(a, theta) for a in others), default=TWO_PI)
    eps = min(0.5, 0.5 * gap)
    if eps < tol.splitting_floor:
        raise GapTooSmall(f"nearest other breakpoint is {gap:.3g} rad away")
    v0, vp, vm = bott_values(path, [theta, theta + eps, theta - eps], tol)
    nu, m = mult
    return SplittingData(theta, vp - v0, vm - v0, nu, m)


def all_splitting_numbers(path: SymplecticPath, tol: Tolerances | None = None) -> list[SplittingData]:
    """Splitting numbers of every unit eigenvalue, ordered by argument."""
    tol = _tol(path, tol)
    return [splitting_numbers(path, complex(math.cos(a), math.sin(a)), tol) for a in unit_eigen_angles(path, tol)]


# ---------------------------------------------------------------------------
# ellipticity certificate
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EllipticityVerdict:
    """Outcome of :func:`elliptic_certificate`.

    ``status`` is ``"Elliptic"`` or ``"HypothesisNotMet"``; ``branch`` names
    the index pair that met the hypotheses (``"lower"`` or ``"upper"``).
    """

    status: str
    branch: str | None
    j: int
    n: int
    lower: tuple[int, int]
    upper: tuple[int, int] | None
    pinned_index: int | None
    elliptic_spectrum: bool

    @property
    def elliptic(self) -> bool:
        return self.status == "Elliptic"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "branch": self.branch,
            "j": self.j,
            "n": self.n,
            "cz_minus": list(self.lower),
            "cz_plus": None if self.upper is None else list(self.upper),
            "pinned_index": self.pinned_index,
            "elliptic_spectrum": self.elliptic_spectrum,
        }


def elliptic_certificate(path: SymplecticPath, j: int, tol: Tolerances | None = None) -> EllipticityVerdict:
    """Certify ellipticity by index pinching.

    If ``cz_minus(path) <= -n`` and ``cz_minus(path^j) >= -n`` for some
    ``j > 1``, the endpoint is elliptic and both indices equal ``-n``;
    dually for ``cz_plus >= n`` and ``cz_plus(path^j) <= n``.  The conclusion
    is checked against the spectrum and the indices; a violation means the
    index stack is inconsistent.

    Raises
    ------
    EngineDisagreement
        If the hypotheses hold but the conclusion fails numerically.
    """
    if j < 2:
        raise ValueError("j must be at least 2")
    tol = _tol(path, tol)
    n = path.n
    spec_elliptic = classify_spectrum(path.endpoint(), tol).elliptic
    it = iterate_path(path, j)
    a, b = cz_minus(path, tol), cz_minus(it, tol)
    branch = None
    upper = None
    if a <= -n and b >= -n:
        branch, pinned, pair = "lower", -n, (a, b)
    else:
        upper = (cz_plus(path, tol), cz_plus(it, tol))
        if upper[0] >= n and upper[1] <= n:
            branch, pinned, pair = "upper", n, upper
    if branch is None:
        return EllipticityVerdict("HypothesisNotMet", None, j, n, (a, b), upper, None, spec_elliptic)
    if not spec_elliptic or pair != (pinned, pinned):
        raise EngineDisagreement(
            f"pinching hypotheses hold ({branch}: {pair}) but the conclusion fails "
            f"(elliptic={spec_elliptic}, expected both indices {pinned})"
        )
    return EllipticityVerdict("Elliptic", branch, j, n, (a, b), upper, pinned, spec_elliptic)
