"""Conley-Zehnder, Robbin-Salamon and lower/upper indices of symplectic paths.

``cz_index`` runs two independent engines (crossing forms and Souriau-map
winding) and insists that they agree.  The lower extension is the index of
the path generated by ``A - eps*I`` for a small, verified-stable ``eps``; the
upper extension is obtained from the lower one of the inverse path.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from ._crossings import CrossingScanner, SouriauTracker, souriau_index
from .config import Tolerances
from .errors import (
    ContinuationAmbiguity,
    CrossingResolutionFailure,
    DegenerateEndpoint,
    EngineDisagreement,
    EpsilonSelectionFailure,
)
from .sympath import (
    SymplecticPath,
    _Flow,
    _Piece,
    _PiecewiseFlow,
    _ProductFlow,
    _shift_pieces,
    classify_spectrum,
    inverse_path,
    iterate_path,
    nullity,
    standard_complex_structure,
)

log = logging.getLogger(__name__)

__all__ = [
    "IndexReport",
    "TrivializationShift",
    "path_nullity",
    "cz_index",
    "rs_index",
    "cz_minus",
    "cz_plus",
    "lower_shift",
    "mean_index",
    "index_report",
    "apply_trivialization_shift",
    "reduced_index",
    "maslov_index",
    "spectral_flow_index",
]


@dataclass(frozen=True)
class IndexReport:
    """Indices of one path (or orbit) in one trivialization.

    Attributes
    ----------
    mu_rs : Fraction
        Robbin-Salamon index, a half-integer.
    mu_minus, mu_plus : int
        Lower and upper semicontinuous extensions of the CZ index.
    mean : float
        Mean index.
    nullity : int
        ``dim ker(Gamma(1) - I)``.
    """

    mu_rs: Fraction
    mu_minus: int
    mu_plus: int
    mean: float
    nullity: int

    @property
    def nondegenerate(self) -> bool:
        return self.nullity == 0

    def to_json(self) -> dict:
        return {
            "mu_rs": f"{int(2 * self.mu_rs)}/2",
            "mu_minus": self.mu_minus,
            "mu_plus": self.mu_plus,
            "mean": self.mean,
            "nullity": self.nullity,
        }


@dataclass(frozen=True)
class TrivializationShift:
    """Change of trivialization by a loop of Maslov index ``maslov``."""

    maslov: int


def _tol(path: SymplecticPath, tol: Tolerances | None) -> Tolerances:
    return path.tol if tol is None else tol


def path_nullity(path: SymplecticPath, tol: Tolerances | None = None) -> int:
    """``dim ker(Gamma(1) - I)`` at ``eig_tol``."""
    return nullity(path.endpoint(), 1.0, _tol(path, tol).eig_tol)


def _crossing_rs(flow: _Flow, tol: Tolerances) -> Fraction:
    return CrossingScanner(flow, tol).index(1.0)


def cz_index(path: SymplecticPath, tol: Tolerances | None = None) -> int:
    """Conley-Zehnder index of a path with non-degenerate endpoint.

    Computed by crossing forms and by Souriau-map winding; the two must agree.
    If the crossing-form engine meets a non-regular crossing the Souriau result
    is returned alone.

    Raises
    ------
    DegenerateEndpoint
        If ``Gamma(1)`` has eigenvalue 1.
    EngineDisagreement
        If both engines succeed with different answers.
    """
    tol = _tol(path, tol)
    k = path_nullity(path, tol)
    if k:
        raise DegenerateEndpoint(f"endpoint has nullity {k}")
    b = souriau_index(path.flow, tol)
    try:
        a = _crossing_rs(path.flow, tol)
    except CrossingResolutionFailure as exc:
        log.debug("crossing engine fell back to Souriau: %s", exc)
        a = b
    if a != b:
        raise EngineDisagreement(f"crossing engine {a} vs Souriau engine {b}")
    if b.denominator != 1:
        raise EngineDisagreement(f"non-integral index {b} for a non-degenerate path")
    return int(b)


def rs_index(path: SymplecticPath, tol: Tolerances | None = None) -> Fraction:
    """Robbin-Salamon index (half-integer), degenerate endpoints allowed."""
    tol = _tol(path, tol)
    try:
        return _crossing_rs(path.flow, tol)
    except CrossingResolutionFailure as exc:
        log.debug("crossing engine fell back to Souriau: %s", exc)
        return souriau_index(path.flow, tol)


# ---------------------------------------------------------------------------
# lower / upper extensions
# ---------------------------------------------------------------------------


def _unit_angles(m: np.ndarray, tol: Tolerances) -> np.ndarray:
    spec = classify_spectrum(m, tol)
    return np.array([math.atan2(c.value.imag, c.value.real) for c in spec.unit_eigenvalues(tol.eig_tol)])


def lower_shift(path: SymplecticPath, tol: Tolerances | None = None) -> float:
    """Initial generator shift for the lower extension.

    Half the smallest positive gap between arguments of unit eigenvalues of
    ``Gamma(1)`` (including the gap to 0), divided by ``2 pi``, clamped to
    ``[eps_floor, eps_cap]``.
    """
    tol = _tol(path, tol)
    angles = np.concatenate([_unit_angles(path.endpoint(), tol), [0.0]])
    diffs = np.abs(angles[:, None] - angles[None, :])
    diffs = np.minimum(diffs, 2 * math.pi - diffs)
    pos = diffs[diffs > tol.cluster_tol]
    gap = float(pos.min()) if pos.size else 2 * math.pi
    return min(tol.eps_cap, max(tol.eps_floor, 0.5 * gap / (2 * math.pi)))


def _shifted_flow(path: SymplecticPath, eps: float) -> _PiecewiseFlow:
    return _PiecewiseFlow(path.n, _shift_pieces(path.flow.pieces(), eps, path.dim), path.tol)


def _twisted_flow(path: SymplecticPath, eps: float) -> _Flow:
    """``exp(-eps J0 t) Gamma(t)``, generated by ``R A R^T - eps I``.

    ``R = exp(-eps J0 t)`` is orthogonal, so the generator stays as small as
    ``A`` even when ``Gamma`` grows exponentially (hyperbolic iterates).  The
    endpoint is conjugate to ``Gamma(1) exp(-eps J0)``, the endpoint of the
    negative definite perturbation ``Gamma(t) exp(-eps J0 t)`` (generator
    ``A - eps Gamma^{-T} Gamma^{-1}``), by the family ``exp(-s eps J0)``; the
    eigenvalues never change along that family, so both paths have the same
    (twisted) indices.
    """
    zero = np.zeros((path.dim, path.dim))
    rot = _PiecewiseFlow(path.n, _shift_pieces([_Piece(0.0, 1.0, zero, None)], eps, path.dim), path.tol)
    return _ProductFlow(rot, path.flow)


def _perturbed_flow(path: SymplecticPath, eps: float, method: str) -> _Flow:
    if method == "auto":
        method = "shift" if all(p.const is not None for p in path.flow.pieces()) else "product"
    if method == "shift":
        return _shifted_flow(path, eps)
    if method == "product":
        return _twisted_flow(path, eps)
    raise ValueError(f"unknown perturbation method {method!r}")


def _nondegenerate_index(flow: _Flow, tol: Tolerances) -> int | None:
    """Index of a (presumed) non-degenerate flow, ``None`` if degenerate.

    Uses the Hermitian Souriau engine: a small perturbation of a degenerate
    path splits each degenerate crossing into a tight cluster of crossings,
    which eigen-angle tracking counts correctly at any separation.  An
    eigen-angle ending at zero marks the endpoint as degenerate.
    """
    res = SouriauTracker(flow, tol).index(1.0)
    if res.end_dim or res.value.denominator != 1:
        return None
    return int(res.value)


def cz_minus(
    path: SymplecticPath, tol: Tolerances | None = None, eps: float | None = None, method: str = "auto"
) -> int:
    """Lower semicontinuous extension of the Conley-Zehnder index.

    The index of a path generated by ``A - P`` with ``P`` small and positive
    definite.  ``method="shift"`` uses ``P = eps I``; ``method="product"`` uses
    ``P = eps Gamma^{-T} Gamma^{-1}``, evaluated through the conjugate
    endpoint path ``exp(-eps J0 t) Gamma(t)`` (see :func:`_twisted_flow`).  ``"auto"`` takes the shift whenever the
    generator is piecewise constant (exact exponentials) and the product
    otherwise (no re-integration).  ``eps`` starts at :func:`lower_shift` (or
    the given value) and is halved until the index is unchanged under
    ``eps -> eps/2``.

    Raises
    ------
    EpsilonSelectionFailure
        If no stable ``eps`` above ``eps_floor / 16`` exists.
    """
    tol = _tol(path, tol)
    e = lower_shift(path, tol) if eps is None else eps
    floor = tol.eps_floor / 16
    cur = _nondegenerate_index(_perturbed_flow(path, e, method), tol)
    while e >= floor:
        nxt = _nondegenerate_index(_perturbed_flow(path, e / 2, method), tol)
        if cur is not None and nxt == cur:
            return cur
        e /= 2
        cur = nxt
    raise EpsilonSelectionFailure("lower index did not stabilise as eps decreased")


def _upper_flow(path: SymplecticPath, eps: float) -> _Flow:
    """``exp(eps J0 t) Gamma(t)``: the inverse of ``Gamma^{-1}(t) exp(-eps J0 t)``."""
    zero = np.zeros((path.dim, path.dim))
    rot = _PiecewiseFlow(path.n, _shift_pieces([_Piece(0.0, 1.0, zero, None)], -eps, path.dim), path.tol)
    return _ProductFlow(rot, path.flow)


def cz_plus(path: SymplecticPath, tol: Tolerances | None = None, literal: bool = False) -> int:
    """Upper extension, ``-cz_minus`` of the inverse path.

    The lower index of ``Gamma^{-1}`` is the index of ``Gamma^{-1}(t)
    exp(-eps J0 t)`` (generator ``-Gamma^T A Gamma - eps Gamma^T Gamma``, a
    negative definite perturbation).  Its inverse ``exp(eps J0 t) Gamma(t)`` is
    evaluated exactly, and the index of a non-degenerate path changes sign
    under inversion, so the inverse path never has to be re-integrated.
    ``literal=True`` instead runs :func:`cz_minus` on :func:`inverse_path`.
    """
    tol = _tol(path, tol)
    if literal:
        return -cz_minus(inverse_path(path), tol)
    e = lower_shift(path, tol)
    floor = tol.eps_floor / 16
    cur = _nondegenerate_index(_upper_flow(path, e), tol)
    while e >= floor:
        nxt = _nondegenerate_index(_upper_flow(path, e / 2), tol)
        if cur is not None and nxt == cur:
            return cur
        e /= 2
        cur = nxt
    raise EpsilonSelectionFailure("upper index did not stabilise as eps decreased")


def mean_index(path: SymplecticPath, k_max: int = 8, tol: Tolerances | None = None) -> float:
    """Mean index from the indices of the iterates ``1..k_max``.

    Each iterate confines the mean index to
    ``[(mu+_k - n)/k, (mu-_k + n)/k]`` (``mu+_k`` is computed only for
    degenerate iterates; otherwise it equals ``mu-_k``).  The least-squares
    slope of ``(mu-_k + mu+_k)/2`` against ``k`` is clamped into the
    intersection of these intervals, so the result is within ``n / k_max`` of
    the limit and exact for resonant rotations.
    """
    if k_max < 4:
        raise ValueError("k_max must be at least 4")
    n = path.n
    ks = np.arange(1, k_max + 1)
    lower, upper = [], []
    for k in ks:
        it = iterate_path(path, int(k))
        lo_k = cz_minus(it, tol)
        lower.append(lo_k)
        upper.append(cz_plus(it, tol) if path_nullity(it, tol) else lo_k)
    lower_a = np.array(lower, dtype=float)
    upper_a = np.array(upper, dtype=float)
    lo = float(np.max((upper_a - n) / ks))
    hi = float(np.min((lower_a + n) / ks))
    if lo > hi + 1e-12:
        raise EngineDisagreement(f"iterate indices inconsistent with a mean index: [{lo}, {hi}]")
    mid = 0.5 * (lower_a + upper_a)
    slope = float(np.dot(ks, mid) / np.dot(ks, ks))
    return min(max(slope, lo), hi)


def index_report(path: SymplecticPath, k_max: int = 8, tol: Tolerances | None = None) -> IndexReport:
    """All indices of ``path`` bundled in an :class:`IndexReport`."""
    tol = _tol(path, tol)
    k = path_nullity(path, tol)
    mu_rs = rs_index(path, tol)
    if k == 0:
        lo = hi = cz_index(path, tol)
    else:
        lo = cz_minus(path, tol)
        hi = cz_plus(path, tol)
    return IndexReport(mu_rs, lo, hi, mean_index(path, k_max, tol), k)


def apply_trivialization_shift(report: IndexReport, shift: TrivializationShift) -> IndexReport:
    """Shift every index and the mean by ``2 * maslov``."""
    s = 2 * shift.maslov
    return replace(
        report,
        mu_rs=report.mu_rs + s,
        mu_minus=report.mu_minus + s,
        mu_plus=report.mu_plus + s,
        mean=report.mean + s,
    )


def reduced_index(mu: int | Fraction, n: int) -> int | Fraction:
    """Reduced index ``mu + n - 2``."""
    return mu + n - 2


def maslov_index(loop: SymplecticPath, samples: int = 400) -> int:
    """Maslov index of a loop in ``Sp(2n)`` (winding of ``det`` of its unitary part)."""
    n = loop.n
    if np.abs(loop.endpoint() - np.eye(2 * n)).max() > 1e-8:
        raise ValueError("not a loop: Gamma(1) != I")
    ts = np.linspace(0.0, 1.0, samples + 1)
    mats = loop.matrices(ts)
    u, _, vh = np.linalg.svd(mats)
    unit = u @ vh
    x = unit[:, :n, :n]
    y = unit[:, n:, :n]
    dets = np.linalg.det(x + 1j * y)
    ang = np.unwrap(np.angle(dets))
    return int(round((ang[-1] - ang[0]) / (2 * math.pi)))


# ---------------------------------------------------------------------------
# spectral flow of the periodic operator
# ---------------------------------------------------------------------------


def _fourier_coefficients(path: SymplecticPath, top: int, nodes: int = 8) -> np.ndarray:
    """``A_hat[j] = int_0^1 A(t) exp(-2 pi i j t) dt`` for ``|j| <= top``."""
    dim = path.dim
    js = np.arange(-top, top + 1)
    out = np.zeros((len(js), dim, dim), dtype=complex)
    x, w = np.polynomial.legendre.leggauss(nodes)
    for p in path.flow.pieces():
        length = p.b - p.a
        if length <= 0:
            continue
        if p.const is not None:
            # exact integral of the exponential
            with np.errstate(divide="ignore", invalid="ignore"):
                k = -2j * math.pi * js
                ints = np.where(js == 0, length, (np.exp(k * p.b) - np.exp(k * p.a)) / np.where(js == 0, 1, k))
            out += ints[:, None, None] * p.const[None]
            continue
        subs = max(4, int(math.ceil(length * top)))
        edges = np.linspace(p.a, p.b, subs + 1)
        for a, b in zip(edges[:-1], edges[1:]):
            tq = 0.5 * (b - a) * x + 0.5 * (a + b)
            wq = 0.5 * (b - a) * w
            vals = np.array([p.gen(float(t)) for t in tq])
            phase = np.exp(-2j * math.pi * np.outer(js, tq)) * wq[None, :]
            out += np.einsum("jq,qab->jab", phase, vals)
    return out


def _negative_count(path: SymplecticPath, modes: int, zero_tol: float, band: float) -> int:
    dim = path.dim
    size = (2 * modes + 1) * dim
    ahat = _fourier_coefficients(path, 2 * modes)
    j0 = standard_complex_structure(path.n)
    op = np.zeros((size, size), dtype=complex)
    for a, m in enumerate(range(-modes, modes + 1)):
        sa = slice(a * dim, (a + 1) * dim)
        op[sa, sa] += -2j * math.pi * m * j0
        for b, l in enumerate(range(-modes, modes + 1)):
            sb = slice(b * dim, (b + 1) * dim)
            op[sa, sb] -= ahat[(m - l) + 2 * modes]
    op = 0.5 * (op + op.conj().T)
    ev = np.linalg.eigvalsh(op)
    amb = ev[(np.abs(ev) > zero_tol) & (np.abs(ev) < band)]
    if amb.size:
        raise ContinuationAmbiguity(f"eigenvalue {amb[0]:.3e} too close to zero to be labelled")
    return int(np.sum(ev < -zero_tol))


def spectral_flow_index(
    path: SymplecticPath, fourier_modes: int = 32, zero_tol: float = 1e-9, band: float = 1e-6
) -> int:
    """Lower index from the spectrum of ``-J0 d/dt - A(t)`` on 1-periodic loops.

    The operator is truncated to Fourier modes ``-M..M``.  Labels are fixed so
    that the zero cluster of ``-J0 d/dt`` carries indices ``-n..n-1``, giving
    ``-n + #negative - 2nM``.  The count is repeated at a finer truncation and
    must not change.

    Raises
    ------
    ContinuationAmbiguity
        If an eigenvalue lies in the ambiguous band around zero or the count
        depends on the truncation.
    """
    n = path.n
    if fourier_modes < 8 * n:
        raise ValueError("fourier_modes must be at least 8n")
    counts = []
    for m in (fourier_modes, fourier_modes + max(2, fourier_modes // 4)):
        counts.append(-n + _negative_count(path, m, zero_tol, band) - 2 * n * m)
    if counts[0] != counts[1]:
        raise ContinuationAmbiguity(f"truncation-dependent count {counts}")
    return counts[0]
