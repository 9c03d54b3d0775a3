"""Symplectic matrices, generator paths and their flows.

Conventions
-----------
Coordinates on ``R^{2n}`` are ordered ``(q_1, ..., q_n, p_1, ..., p_n)`` and
``J0 = [[0, -I], [I, 0]]``.  A path is described by a symmetric generator
``A(t)`` and solves ``Gamma'(t) = J0 A(t) Gamma(t)`` with ``Gamma(0) = I``.
With the complex coordinate ``z = q + ip`` the constant generator ``theta*I``
acts by ``z -> exp(i theta t) z``.

A :class:`SymplecticPath` stores generator samples.  Repeated sample times mark
a jump of the generator; between jumps the samples are joined by a cubic
spline, or held constant with ``interpolation="constant"``.  Constant pieces are
propagated by the matrix exponential and everything else by an adaptive
8th-order Runge-Kutta scheme.  Paths derived from other paths (iterates,
inverses, products, direct sums, shifted generators) evaluate ``Gamma(t)``
exactly from their parents, and still expose generator samples for export.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.linalg import expm

from .config import DEFAULT_TOLERANCES, Tolerances
from .errors import (
    EigenSolverFailure,
    IntegrationDivergence,
    NonSymmetricGenerator,
    NotSymplectic,
    SchemaError,
)

__all__ = [
    "standard_complex_structure",
    "symplectic_defect",
    "symplectic_inverse",
    "project_symplectic",
    "SymplecticMatrix",
    "SymplecticPath",
    "EigenCluster",
    "SpectralClassification",
    "integrate_generator",
    "iterate_path",
    "inverse_path",
    "product_path",
    "direct_sum",
    "shifted_path",
    "rotation_path",
    "classify_spectrum",
]

GeneratorFn = Callable[[float], np.ndarray]


def standard_complex_structure(n: int) -> np.ndarray:
    """Return ``J0`` for half-dimension ``n``."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, -eye], [eye, zero]])


def symplectic_defect(m: np.ndarray) -> float | np.ndarray:
    """``||M^T J0 M - J0||_inf`` (max abs entry), batched over leading axes."""
    n = m.shape[-1] // 2
    j0 = standard_complex_structure(n)
    d = np.swapaxes(m, -1, -2) @ j0 @ m - j0
    return np.abs(d).max(axis=(-2, -1))


def symplectic_inverse(m: np.ndarray) -> np.ndarray:
    """Inverse of a symplectic matrix, ``-J0 M^T J0`` (batched)."""
    n = m.shape[-1] // 2
    j0 = standard_complex_structure(n)
    return -j0 @ np.swapaxes(m, -1, -2) @ j0


def project_symplectic(m: np.ndarray, tol: float = 1e-14, max_iter: int = 5) -> np.ndarray:
    """Pull a nearly symplectic matrix back onto ``Sp(2n)``.

    Newton-type polar correction ``M <- M (I - (X - I)/2)`` with
    ``X = M^{-1}_sympl M``; converges quadratically for small drift.
    """
    m = np.array(m, dtype=float)
    eye = np.eye(m.shape[-1])
    for _ in range(max_iter):
        x = symplectic_inverse(m) @ m
        if np.abs(x - eye).max() <= tol:
            break
        m = m @ (eye - 0.5 * (x - eye))
    return m


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """A validated element of ``Sp(2n)``.

    Parameters
    ----------
    entries : array_like
        The ``2n x 2n`` real matrix.
    tol : float
        Accepted symplectic defect.
    """

    entries: np.ndarray
    tol: float = DEFAULT_TOLERANCES.symplectic_tol

    def __post_init__(self) -> None:
        m = np.array(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise NotSymplectic(f"expected a square matrix of even size, got {m.shape}")
        defect = float(symplectic_defect(m))
        if defect > self.tol * max(1.0, np.abs(m).max() ** 2):
            raise NotSymplectic(f"symplectic defect {defect:.3e} exceeds {self.tol:.1e}")
        if abs(np.linalg.det(m) - 1.0) > max(self.tol, 1e-9) * max(1.0, np.abs(m).max() ** m.shape[0]):
            raise NotSymplectic("determinant differs from 1")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def n(self) -> int:
        return self.entries.shape[0] // 2

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        return SymplecticMatrix(self.entries @ np.asarray(other), self.tol)

    def inverse(self) -> "SymplecticMatrix":
        return SymplecticMatrix(symplectic_inverse(self.entries), self.tol)


# ---------------------------------------------------------------------------
# flows: exact evaluators of Gamma(t)
# ---------------------------------------------------------------------------


@dataclass
class _Piece:
    a: float
    b: float
    const: np.ndarray | None
    gen: GeneratorFn


def _const_gen(c: np.ndarray) -> GeneratorFn:
    return lambda t: c


class _Flow:
    """Base class: subclasses provide ``breaks``, ``generator``, ``matrices``."""

    n: int
    breaks: np.ndarray

    def generator(self, t: float) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def matrices(self, ts: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def pieces(self) -> list[_Piece]:  # pragma: no cover - abstract
        raise NotImplementedError

    def matrix(self, t: float) -> np.ndarray:
        return self.matrices(np.array([t]))[0]

    @cached_property
    def endpoint(self) -> np.ndarray:
        return self.matrix(1.0)

    def norm_bound(self, a: float, b: float) -> float:
        """Rough ``max ||A||_2`` on ``[a, b]`` from a few generator samples."""
        ts = np.linspace(a, b, 5)
        ts[-1] = b - 1e-12 * max(1.0, b - a) if b > a else b
        return max(np.linalg.norm(self.generator(float(t)), 2) for t in ts)

    def piece_index(self, ts: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.breaks, ts, side="right") - 1
        return np.clip(idx, 0, len(self.breaks) - 2)


class _ConstExp:
    """``t -> exp(h t)`` for many ``t``, through one eigendecomposition of ``h``.

    Falls back to :func:`scipy.linalg.expm` per time when the eigenbasis is
    ill-conditioned (near-defective ``h``).
    """

    max_cond = 1e4

    def __init__(self, h: np.ndarray):
        self.h = h
        lam, vec = np.linalg.eig(h)
        self.ok = bool(np.isfinite(vec).all()) and np.linalg.cond(vec) <= self.max_cond
        if self.ok:
            self.lam, self.vec, self.inv = lam, vec, np.linalg.inv(vec)

    def __call__(self, dt: np.ndarray) -> np.ndarray:
        dt = np.asarray(dt, dtype=float)
        if not self.ok:
            return expm(self.h[None] * dt[:, None, None])
        e = np.exp(self.lam[None, :] * dt[:, None])
        return ((self.vec[None] * e[:, None, :]) @ self.inv[None]).real


class _PiecewiseFlow(_Flow):
    """Flow assembled from generator pieces, propagated piece by piece."""

    def __init__(self, n: int, pieces: Sequence[_Piece], tol: Tolerances):
        self.n = n
        self._pieces = list(pieces)
        self.tol = tol
        self.breaks = np.array([p.a for p in self._pieces] + [self._pieces[-1].b])
        self._j0 = standard_complex_structure(n)
        self._starts: list[np.ndarray] | None = None
        self._solutions: list = []

    def pieces(self) -> list[_Piece]:
        return self._pieces

    def generator(self, t: float) -> np.ndarray:
        i = int(self.piece_index(np.array([t]))[0])
        return self._pieces[i].gen(t)

    @cached_property
    def _const_norms(self) -> list[float | None]:
        return [None if p.const is None else float(np.linalg.norm(p.const, 2)) for p in self._pieces]

    def norm_bound(self, a: float, b: float) -> float:
        hit = [i for i, p in enumerate(self._pieces) if p.a < b and p.b > a] or [int(self.piece_index(np.array([a]))[0])]
        norms = [self._const_norms[i] for i in hit]
        if any(v is None for v in norms):
            return super().norm_bound(a, b)
        return max(norms)

    def _propagate(self) -> None:
        if self._starts is not None:
            return
        dim = 2 * self.n
        start = np.eye(dim)
        starts, sols = [], []
        for p in self._pieces:
            starts.append(start)
            if p.const is not None:
                h = self._j0 @ p.const
                sols.append(_ConstExp(h))
                start = expm(h * (p.b - p.a)) @ start
            else:
                sol = self._integrate(p, start)
                sols.append(sol)
                start = self._finish(sol.sol(p.b).reshape(dim, dim))
        self._starts, self._solutions = starts, sols

    def _integrate(self, p: _Piece, start: np.ndarray):
        dim = 2 * self.n
        j0 = self._j0

        def rhs(t, y):
            return (j0 @ p.gen(t) @ y.reshape(dim, dim)).ravel()

        scale = max(1.0, float(np.abs(start).max()))
        sol = solve_ivp(
            rhs,
            (p.a, p.b),
            start.ravel(),
            method="DOP853",
            rtol=self.tol.rtol,
            atol=self.tol.rtol * scale,
            dense_output=True,
        )
        if not sol.success:
            raise IntegrationDivergence(sol.message)
        return sol

    def _finish(self, m: np.ndarray) -> np.ndarray:
        if symplectic_defect(m) > self.tol.symplectic_tol / 10 * max(1.0, np.abs(m).max() ** 2):
            m = project_symplectic(m)
        return m

    def matrices(self, ts: np.ndarray) -> np.ndarray:
        self._propagate()
        ts = np.asarray(ts, dtype=float)
        dim = 2 * self.n
        out = np.empty((len(ts), dim, dim))
        idx = self.piece_index(ts)
        for i in np.unique(idx):
            sel = np.nonzero(idx == i)[0]
            p = self._pieces[i]
            if p.const is not None:
                out[sel] = self._solutions[i](ts[sel] - p.a) @ self._starts[i]
            else:
                vals = self._solutions[i].sol(ts[sel]).T.reshape(-1, dim, dim)
                drift = symplectic_defect(vals)
                bad = drift > self.tol.symplectic_tol / 10 * np.maximum(1.0, np.abs(vals).max(axis=(1, 2)) ** 2)
                for j in np.nonzero(bad)[0]:
                    vals[j] = project_symplectic(vals[j])
                out[sel] = vals
        return out


class _IterateFlow(_Flow):
    def __init__(self, parent: _Flow, k: int):
        self.parent, self.k, self.n = parent, k, parent.n
        self.breaks = np.unique(np.concatenate([(parent.breaks + j) / k for j in range(k)]))
        self.breaks[-1] = 1.0
        p1 = parent.endpoint
        powers = [np.eye(2 * self.n)]
        for _ in range(k - 1):
            powers.append(powers[-1] @ p1)
        self._powers = np.array(powers)

    def _split(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        kt = np.asarray(ts, dtype=float) * self.k
        j = np.clip(np.floor(kt).astype(int), 0, self.k - 1)
        return j, kt - j

    def generator(self, t: float) -> np.ndarray:
        j, s = self._split(np.array([t]))
        return self.k * self.parent.generator(float(s[0]))

    def norm_bound(self, a: float, b: float) -> float:
        if b - a >= 1.0 / self.k:
            return self.k * self.parent.norm_bound(0.0, 1.0)
        j, s = self._split(np.array([a, b]))
        if j[0] == j[1] or s[1] == 0.0:
            return self.k * self.parent.norm_bound(float(s[0]), float(s[1]) if j[0] == j[1] else 1.0)
        return self.k * max(self.parent.norm_bound(float(s[0]), 1.0), self.parent.norm_bound(0.0, float(s[1])))

    def matrices(self, ts: np.ndarray) -> np.ndarray:
        j, s = self._split(ts)
        return self.parent.matrices(s) @ self._powers[j]

    def pieces(self) -> list[_Piece]:
        out = []
        k = self.k
        for j in range(k):
            for p in self.parent.pieces():
                const = None if p.const is None else k * p.const
                gen = (lambda g, jj: (lambda t: k * g(k * t - jj)))(p.gen, j)
                out.append(_Piece((p.a + j) / k, (p.b + j) / k, const, gen))
        return out


class _InverseFlow(_Flow):
    def __init__(self, parent: _Flow):
        self.parent, self.n, self.breaks = parent, parent.n, parent.breaks

    def generator(self, t: float) -> np.ndarray:
        g = self.parent.matrix(t)
        b = -g.T @ self.parent.generator(t) @ g
        return 0.5 * (b + b.T)

    def matrices(self, ts: np.ndarray) -> np.ndarray:
        return symplectic_inverse(self.parent.matrices(ts))

    def pieces(self) -> list[_Piece]:
        return [_Piece(a, b, None, self.generator) for a, b in zip(self.breaks[:-1], self.breaks[1:])]


class _ProductFlow(_Flow):
    """``Gamma(t) = L(t) R(t)``."""

    def __init__(self, left: _Flow, right: _Flow):
        self.left, self.right, self.n = left, right, left.n
        self.breaks = np.union1d(left.breaks, right.breaks)

    def generator(self, t: float) -> np.ndarray:
        li = symplectic_inverse(self.left.matrix(t))
        b = self.left.generator(t) + li.T @ self.right.generator(t) @ li
        return 0.5 * (b + b.T)

    def matrices(self, ts: np.ndarray) -> np.ndarray:
        return self.left.matrices(ts) @ self.right.matrices(ts)

    def norm_bound(self, a: float, b: float) -> float:
        # ||A_L + L^{-T} A_R L^{-1}|| <= ||A_L|| + ||L||^2 ||A_R|| (symplectic: ||L^{-1}|| = ||L||)
        ts = np.linspace(a, b, 5)
        cond = float(np.linalg.norm(self.left.matrices(ts), 2, axis=(1, 2)).max())
        return self.left.norm_bound(a, b) + cond**2 * self.right.norm_bound(a, b)

    def pieces(self) -> list[_Piece]:
        return [_Piece(a, b, None, self.generator) for a, b in zip(self.breaks[:-1], self.breaks[1:])]


def _sum_permutation(n1: int, n2: int) -> np.ndarray:
    """Row order taking ``(q1, p1, q2, p2)`` blocks to ``(q1, q2, p1, p2)``."""
    q1 = np.arange(n1)
    p1 = n1 + np.arange(n1)
    q2 = 2 * n1 + np.arange(n2)
    p2 = 2 * n1 + n2 + np.arange(n2)
    return np.concatenate([q1, q2, p1, p2])


def _block_sum(x: np.ndarray, y: np.ndarray, perm: np.ndarray) -> np.ndarray:
    d1, d2 = x.shape[-1], y.shape[-1]
    out = np.zeros(x.shape[:-2] + (d1 + d2, d1 + d2))
    out[..., :d1, :d1] = x
    out[..., d1:, d1:] = y
    return out[..., perm, :][..., :, perm]


class _DirectSumFlow(_Flow):
    def __init__(self, first: _Flow, second: _Flow):
        self.first, self.second = first, second
        self.n = first.n + second.n
        self.breaks = np.union1d(first.breaks, second.breaks)
        self._perm = _sum_permutation(first.n, second.n)

    def generator(self, t: float) -> np.ndarray:
        return _block_sum(self.first.generator(t), self.second.generator(t), self._perm)

    def matrices(self, ts: np.ndarray) -> np.ndarray:
        return _block_sum(self.first.matrices(ts), self.second.matrices(ts), self._perm)

    def pieces(self) -> list[_Piece]:
        p1, p2 = self.first.pieces(), self.second.pieces()
        b1 = np.array([p.a for p in p1])
        b2 = np.array([p.a for p in p2])
        out = []
        for a, b in zip(self.breaks[:-1], self.breaks[1:]):
            mid = 0.5 * (a + b)
            x = p1[max(0, int(np.searchsorted(b1, mid, side="right")) - 1)]
            y = p2[max(0, int(np.searchsorted(b2, mid, side="right")) - 1)]
            if x.const is not None and y.const is not None:
                c = _block_sum(x.const, y.const, self._perm)
                out.append(_Piece(a, b, c, _const_gen(c)))
            else:
                out.append(_Piece(a, b, None, self.generator))
        return out


def _shift_pieces(pieces: Iterable[_Piece], eps: float, dim: int) -> list[_Piece]:
    eye = np.eye(dim)
    out = []
    for p in pieces:
        if p.const is not None:
            c = p.const - eps * eye
            out.append(_Piece(p.a, p.b, c, _const_gen(c)))
        else:
            out.append(_Piece(p.a, p.b, None, (lambda g: (lambda t: g(t) - eps * eye))(p.gen)))
    return out


# ---------------------------------------------------------------------------
# paths
# ---------------------------------------------------------------------------


def _sampled_pieces(
    times: np.ndarray, gens: np.ndarray, interpolation: str
) -> list[_Piece]:
    pieces: list[_Piece] = []
    if interpolation == "constant":
        for i in range(len(times) - 1):
            if times[i + 1] > times[i]:
                c = gens[i]
                pieces.append(_Piece(float(times[i]), float(times[i + 1]), c, _const_gen(c)))
        return pieces
    # cubic: split at repeated times (generator jumps)
    cuts = [0] + [i + 1 for i in range(len(times) - 1) if times[i + 1] == times[i]] + [len(times)]
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        t, g = times[lo:hi], gens[lo:hi]
        if len(t) < 2:
            continue
        if np.all(np.abs(g - g[0]).max(axis=(1, 2)) == 0.0):
            c = g[0]
            pieces.append(_Piece(float(t[0]), float(t[-1]), c, _const_gen(c)))
            continue
        spline = CubicSpline(t, g, axis=0)

        def gen(s, spline=spline):
            a = spline(s)
            return 0.5 * (a + a.T)

        pieces.append(_Piece(float(t[0]), float(t[-1]), None, gen))
    return pieces


@dataclass(frozen=True, eq=False)
class SymplecticPath:
    """A path in ``Sp(2n)`` starting at the identity, given by its generator.

    Parameters
    ----------
    n : int
        Half-dimension.
    times : sequence of float
        Non-decreasing sample times from 0 to 1.  A repeated time marks a jump
        of the generator.
    generators : sequence of array_like
        Symmetric ``2n x 2n`` generator samples ``A(t_i)``.
    interpolation : {"cubic", "constant"}
        How samples are joined.  ``"constant"`` holds ``A(t_i)`` on
        ``[t_i, t_{i+1})``.
    tol : Tolerances
        Tolerances used when integrating and validating.

    Examples
    --------
    >>> import numpy as np
    >>> p = SymplecticPath.constant(np.pi / 2 * np.eye(2))
    >>> np.round(p.matrix(1.0), 12)
    array([[ 0., -1.],
           [ 1.,  0.]])
    """

    n: int
    times: tuple[float, ...]
    generators: tuple[np.ndarray, ...]
    interpolation: str = "cubic"
    tol: Tolerances = DEFAULT_TOLERANCES
    _flow: _Flow | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise SchemaError("n must be positive")
        if self.interpolation not in ("cubic", "constant"):
            raise SchemaError(f"unknown interpolation {self.interpolation!r}")
        times = np.asarray(self.times, dtype=float)
        gens = np.asarray(self.generators, dtype=float)
        dim = 2 * self.n
        if gens.ndim != 3 or gens.shape[1:] != (dim, dim) or len(gens) != len(times):
            raise SchemaError("generator samples must be 2n x 2n and match the sample times")
        if len(times) < 2 or times[0] != 0.0 or times[-1] != 1.0 or np.any(np.diff(times) < 0):
            raise SchemaError("sample times must be non-decreasing from 0 to 1")
        asym = np.abs(gens - np.swapaxes(gens, 1, 2)).max()
        if asym > self.tol.symplectic_tol * max(1.0, np.abs(gens).max()):
            raise NonSymmetricGenerator(f"generator asymmetry {asym:.3e}")
        gens = 0.5 * (gens + np.swapaxes(gens, 1, 2))
        gens.setflags(write=False)
        object.__setattr__(self, "times", tuple(float(t) for t in times))
        object.__setattr__(self, "generators", tuple(gens))
        if self._flow is None:
            pieces = _sampled_pieces(times, gens, self.interpolation)
            if not pieces:
                raise SchemaError("path has no positive-length piece")
            object.__setattr__(self, "_flow", _PiecewiseFlow(self.n, pieces, self.tol))

    # construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, a: np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES) -> "SymplecticPath":
        """Path generated by the constant symmetric matrix ``a``."""
        a = np.asarray(a, dtype=float)
        return cls(a.shape[0] // 2, (0.0, 1.0), (a, a), "constant", tol)

    @classmethod
    def piecewise_constant(
        cls, breaks: Sequence[float], generators: Sequence[np.ndarray], tol: Tolerances = DEFAULT_TOLERANCES
    ) -> "SymplecticPath":
        """Path with generator ``generators[i]`` on ``[breaks[i], breaks[i+1])``."""
        gens = [np.asarray(g, dtype=float) for g in generators]
        if len(breaks) != len(gens) + 1:
            raise SchemaError("need one more break than generators")
        return cls(gens[0].shape[0] // 2, tuple(breaks), tuple(gens + [gens[-1]]), "constant", tol)

    @classmethod
    def _derived(cls, flow: _Flow, tol: Tolerances, samples_per_piece: int = 4) -> "SymplecticPath":
        times: list[float] = []
        gens: list[np.ndarray] = []
        for p in flow.pieces():
            ts = np.linspace(p.a, p.b, samples_per_piece)
            for t in ts:
                times.append(float(t))
                gens.append(p.gen(float(t)) if t < p.b else p.gen(float(p.b)))
        times[0], times[-1] = 0.0, 1.0
        return cls(flow.n, tuple(times), tuple(gens), "cubic", tol, flow)

    # evaluation --------------------------------------------------------------

    @property
    def flow(self) -> _Flow:
        return self._flow  # type: ignore[return-value]

    @property
    def dim(self) -> int:
        return 2 * self.n

    def matrix(self, t: float) -> np.ndarray:
        """``Gamma(t)`` as a plain array."""
        if t == 0.0:
            return np.eye(self.dim)
        return self.flow.matrix(float(t))

    def matrices(self, ts: Sequence[float]) -> np.ndarray:
        return self.flow.matrices(np.asarray(ts, dtype=float))

    def endpoint(self) -> np.ndarray:
        return self.flow.endpoint

    def generator(self, t: float) -> np.ndarray:
        return self.flow.generator(float(t))

    # serialisation -----------------------------------------------------------

    def to_json(self) -> dict:
        doc = {
            "n": self.n,
            "samples": [{"t": t, "A": np.asarray(a).tolist()} for t, a in zip(self.times, self.generators)],
        }
        if self.interpolation != "cubic":
            doc["interpolation"] = self.interpolation
        return doc

    @classmethod
    def from_json(cls, doc: dict, tol: Tolerances = DEFAULT_TOLERANCES) -> "SymplecticPath":
        """Parse the path exchange format, rejecting unknown keys."""
        if not isinstance(doc, dict):
            raise SchemaError("path document must be an object")
        extra = set(doc) - {"n", "samples", "interpolation"}
        if extra:
            raise SchemaError(f"unknown path keys: {sorted(extra)}")
        try:
            n = doc["n"]
            samples = doc["samples"]
        except KeyError as exc:
            raise SchemaError(f"missing key {exc}") from None
        if not isinstance(n, int) or isinstance(n, bool) or not isinstance(samples, list):
            raise SchemaError("n must be an integer and samples a list")
        times, gens = [], []
        for s in samples:
            if not isinstance(s, dict) or set(s) != {"t", "A"}:
                raise SchemaError("each sample must have exactly the keys 't' and 'A'")
            try:
                a = np.asarray(s["A"], dtype=float)
                t = float(s["t"])
            except (TypeError, ValueError) as exc:
                raise SchemaError(f"bad sample: {exc}") from None
            times.append(t)
            gens.append(a)
        try:
            gens_arr = np.asarray(gens, dtype=float)
        except ValueError as exc:
            raise SchemaError(f"ragged generator samples: {exc}") from None
        return cls(n, tuple(times), tuple(gens_arr), doc.get("interpolation", "cubic"), tol)


def integrate_generator(path: SymplecticPath, t: float) -> SymplecticMatrix:
    """Return ``Gamma(t)`` for ``t`` in ``[0, 1]``."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    m = path.matrix(t)
    return SymplecticMatrix(m, path.tol.symplectic_tol)


def iterate_path(path: SymplecticPath, k: int) -> SymplecticPath:
    """The ``k``-fold iterate ``Gamma(kt - j) Gamma(1)^j`` on ``[j/k, (j+1)/k]``."""
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return path
    return SymplecticPath._derived(_IterateFlow(path.flow, k), path.tol, samples_per_piece=2 if _all_const(path) else 4)


def _all_const(path: SymplecticPath) -> bool:
    return all(p.const is not None for p in path.flow.pieces())


def inverse_path(path: SymplecticPath) -> SymplecticPath:
    """The path ``t -> Gamma(t)^{-1}``, generated by ``-Gamma^T A Gamma``."""
    return SymplecticPath._derived(_InverseFlow(path.flow), path.tol)


def product_path(left: SymplecticPath, right: SymplecticPath) -> SymplecticPath:
    """Pointwise product ``t -> L(t) R(t)`` (used with loops for the Loop axiom)."""
    if left.n != right.n:
        raise ValueError("dimension mismatch")
    return SymplecticPath._derived(_ProductFlow(left.flow, right.flow), left.tol)


def direct_sum(first: SymplecticPath, second: SymplecticPath) -> SymplecticPath:
    """Block direct sum acting on ``R^{2n1} + R^{2n2}`` in canonical ordering."""
    return SymplecticPath._derived(_DirectSumFlow(first.flow, second.flow), first.tol, samples_per_piece=2)


def shifted_path(path: SymplecticPath, eps: float) -> SymplecticPath:
    """Path generated by ``A(t) - eps * I``."""
    flow = _PiecewiseFlow(path.n, _shift_pieces(path.flow.pieces(), eps, path.dim), path.tol)
    return SymplecticPath._derived(flow, path.tol, samples_per_piece=2)


def rotation_path(angles: Sequence[float], tol: Tolerances = DEFAULT_TOLERANCES) -> SymplecticPath:
    """Unitary path rotating the ``j``-th complex coordinate by ``angles[j] * t``."""
    ang = np.asarray(angles, dtype=float)
    return SymplecticPath.constant(np.diag(np.concatenate([ang, ang])), tol)


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EigenCluster:
    """One eigenvalue with its algebraic and geometric multiplicity."""

    value: complex
    algebraic: int
    geometric: int

    @property
    def on_unit_circle(self) -> bool:
        return abs(abs(self.value) - 1.0) <= DEFAULT_TOLERANCES.eig_tol


@dataclass(frozen=True)
class SpectralClassification:
    eigenvalues: tuple[EigenCluster, ...]
    elliptic: bool
    nullity: int

    def unit_eigenvalues(self, eig_tol: float = DEFAULT_TOLERANCES.eig_tol) -> tuple[EigenCluster, ...]:
        return tuple(c for c in self.eigenvalues if abs(abs(c.value) - 1.0) <= eig_tol)


def _cluster(values: np.ndarray, tol: float) -> list[list[int]]:
    """Single-linkage clustering of complex numbers."""
    m = len(values)
    parent = list(range(m))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            if abs(values[i] - values[j]) <= tol * max(1.0, abs(values[i])):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(m):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def nullity(m: np.ndarray, z: complex = 1.0, tol: float = DEFAULT_TOLERANCES.eig_tol) -> int:
    """``dim ker(M - z I)`` by singular-value thresholding.

    The threshold is ``tol * sqrt(max(1, max|M|))``: integration error in an
    endpoint grows in proportion to its size (with a far smaller constant),
    while a threshold linear in ``max|M|`` would call every strongly
    hyperbolic matrix degenerate.
    """
    m = np.asarray(m)
    s = np.linalg.svd(m - z * np.eye(m.shape[0]), compute_uv=False)
    return int(np.sum(s <= tol * math.sqrt(max(1.0, float(np.abs(m).max())))))


def classify_spectrum(
    m: SymplecticMatrix | np.ndarray, tol: Tolerances = DEFAULT_TOLERANCES
) -> SpectralClassification:
    """Eigenvalues with multiplicities, ellipticity and nullity of ``M``.

    Nearly equal eigenvalues (within ``cluster_tol``) are merged; the cluster
    mean is used as representative, which is accurate even when a Jordan
    block splits the computed eigenvalues.
    """
    a = np.asarray(m, dtype=float)
    try:
        vals = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverFailure(str(exc)) from None
    if not np.all(np.isfinite(vals)):
        raise EigenSolverFailure("non-finite eigenvalues")
    clusters = []
    for group in _cluster(vals, tol.cluster_tol):
        z = complex(np.mean(vals[group]))
        if abs(z.imag) <= tol.eig_tol * max(1.0, abs(z)):
            z = complex(z.real, 0.0)
        if abs(abs(z) - 1.0) <= tol.eig_tol:
            z = z / abs(z)
        geo = max(1, nullity(a, z, max(tol.eig_tol, math.sqrt(np.finfo(float).eps) * 10)))
        clusters.append(EigenCluster(z, len(group), min(geo, len(group))))
    clusters.sort(key=lambda c: (round(abs(c.value), 9), round(math.atan2(c.value.imag, c.value.real), 9)))
    elliptic = all(abs(abs(c.value) - 1.0) <= tol.eig_tol for c in clusters)
    return SpectralClassification(tuple(clusters), elliptic, nullity(a, 1.0, tol.eig_tol))
