"""Numerical engines behind the index functions.

Two independent computations of crossing indices of a flow ``Gamma(t)``:

* :class:`CrossingScanner` locates the parameters where ``Gamma(t) - w I`` is
  singular for a unit complex ``w`` and sums signatures of the crossing form
  ``<v, A(t) v>`` restricted to the kernel.  Zeros of the smallest singular
  value of ``Gamma(t) - w I`` are isolated by a Lipschitz branch and bound
  and refined by bounded minimisation.
* :func:`souriau_index` tracks the eigenvalue angles of the relative Souriau
  map of the graph Lagrangian of ``Gamma(t)`` and reads off the
  Robbin-Salamon index from the final angles.  It needs no regularity of the
  crossings and therefore also serves as fallback.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linear_sum_assignment, minimize_scalar

from .config import Tolerances
from .errors import CrossingResolutionFailure
from .sympath import _Flow

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Crossing:
    """A refined crossing and its weighted contribution to the index."""

    t: float
    dim: int
    contribution: Fraction
    kind: str  # "start", "interior" or "end"


def scan_times(flow: _Flow, tol: Tolerances, min_points: int = 4) -> np.ndarray:
    """Grid on ``[0, 1]`` with ``int ||A|| dt`` below ``tol.step_angle`` per step."""
    parts = []
    for a, b in zip(flow.breaks[:-1], flow.breaks[1:]):
        if b <= a:
            continue
        rate = flow.norm_bound(a, b)
        m = max(min_points, int(math.ceil(rate * (b - a) / tol.step_angle)))
        parts.append(np.linspace(a, b, m + 1))
    ts = np.unique(np.concatenate(parts))
    return ts


def _smin(m: np.ndarray, w: complex) -> float:
    return float(np.linalg.svd(m - w * np.eye(m.shape[0]), compute_uv=False)[-1])


class CrossingScanner:
    """Crossing-form index of one flow, reusable for many unit complex ``w``.

    Crossings are isolated by a Lipschitz branch and bound on
    ``s(t) = smin(Gamma(t) - w I)``: an interval ``[a, b]`` can only contain a
    zero if ``s(a) + s(b) <= L (b - a)`` where ``L`` bounds ``||Gamma'||``.
    ``L`` is the largest secant slope of ``Gamma`` over the neighbouring grid
    intervals, inflated by ``safety * exp(||A|| h)``.  Surviving intervals are
    bisected (in batches) down to ``leaf`` width and each cluster of leaves is
    refined by bounded minimisation of ``s(t)^2``.

    Parameters
    ----------
    flow : _Flow
        Evaluator of ``Gamma(t)`` and ``A(t)``.
    tol : Tolerances
        Thresholds for candidate acceptance and kernel extraction.
    """

    leaf = 1e-10
    group_gap = 1e-4
    overlap_tol = 0.1
    safety = 2.0
    budget = 20000

    def __init__(self, flow: _Flow, tol: Tolerances):
        self.flow = flow
        self.tol = tol
        self.ts = scan_times(flow, tol)
        self.mats = flow.matrices(self.ts)
        self.mats[0] = np.eye(self.mats.shape[-1])
        self.breaks = flow.breaks
        h = np.diff(self.ts)
        sec = np.linalg.norm(np.diff(self.mats, axis=0), 2, axis=(1, 2)) / h
        near = np.maximum(sec, np.maximum(np.r_[sec[:1], sec[:-1]], np.r_[sec[1:], sec[-1:]]))
        pidx = flow.piece_index(0.5 * (self.ts[:-1] + self.ts[1:]))
        rates = np.array(
            [flow.norm_bound(a, b) if b > a else 0.0 for a, b in zip(flow.breaks[:-1], flow.breaks[1:])]
        )
        self.lip = self.safety * near * np.exp(1.25 * rates[pidx] * h) + 1e-12

    # -- helpers ---------------------------------------------------------------

    @staticmethod
    def _scale(m: np.ndarray) -> float:
        # same square-root scaling as sympath.nullity
        return math.sqrt(max(1.0, float(np.abs(m).max())))

    @staticmethod
    def _smins(mats: np.ndarray, w: complex) -> np.ndarray:
        eye = np.eye(mats.shape[-1])
        return np.linalg.svd(mats - w * eye, compute_uv=False)[:, -1]

    def _refine(self, w: complex, lo: float, hi: float) -> tuple[float, float]:
        # smin is V-shaped at a simple zero; its square is smooth, so Brent's
        # parabolic steps converge quickly.  Brent's stopping rule has a
        # sqrt(eps) * |x| term, so minimise in a coordinate centred on the bracket
        mid = 0.5 * (lo + hi)
        f = lambda t: _smin(self.flow.matrix(t), w) ** 2  # noqa: E731
        res = minimize_scalar(
            lambda u: f(mid + u), bounds=(lo - mid, hi - mid), method="bounded", options={"xatol": 1e-15, "maxiter": 200}
        )
        best = (mid + float(res.x), float(res.fun))
        for edge in (lo, hi):
            val = f(edge)
            if val < best[1]:
                best = (edge, val)
        return best[0], math.sqrt(max(best[1], 0.0))

    @staticmethod
    def _dips(rows: np.ndarray) -> list[tuple[float, float]]:
        """Brackets around the local minima of ``s`` inside one cluster of leaves.

        Crossings closer together than the clustering gap end up in one
        cluster; each local minimum of the sampled ``s`` is refined on its own.
        """
        ts = np.concatenate([rows[:, 0], rows[-1:, 1]])
        vals = np.concatenate([rows[:, 2], rows[-1:, 3]])
        # leaves are contiguous, so rows[i, 1] == rows[i + 1, 0] up to rounding
        if len(ts) <= 2:
            return [(float(ts[0]), float(ts[-1]))]
        out = []
        m = len(vals)
        i = 0
        while i < m:
            j = i
            while j + 1 < m and vals[j + 1] == vals[i]:
                j += 1
            left = vals[i - 1] if i > 0 else np.inf
            right = vals[j + 1] if j + 1 < m else np.inf
            if vals[i] < left and vals[i] < right:
                out.append((float(ts[max(i - 1, 0)]), float(ts[min(j + 1, m - 1)])))
            i = j + 1
        return out or [(float(ts[0]), float(ts[-1]))]

    def _kernel(self, m: np.ndarray, w: complex, dim: int | None = None) -> np.ndarray:
        """Orthonormal basis of ``ker(m - w)``, or of the ``dim`` smallest singular directions."""
        _, s, vh = np.linalg.svd(m - w * np.eye(m.shape[0]))
        k = dim if dim is not None else max(1, int(np.sum(s <= self.tol.kernel_tol * self._scale(m))))
        return vh[-k:].conj().T

    def _form(self, m: np.ndarray, w: complex, a: np.ndarray, dim: int | None = None) -> np.ndarray:
        """Eigenvalues of the crossing form on ``ker(m - w)``."""
        v = self._kernel(m, w, dim)
        q = v.conj().T @ a @ v
        q = 0.5 * (q + q.conj().T)
        return np.linalg.eigvalsh(q)

    def _signature(
        self, m: np.ndarray, w: complex, a: np.ndarray, where: float, dim: int | None = None
    ) -> tuple[int, int]:
        ev = self._form(m, w, a, dim)
        thr = self.tol.form_tol * max(1.0, float(np.abs(a).max()))
        if np.any(np.abs(ev) <= thr):
            raise CrossingResolutionFailure(
                f"non-regular crossing at t={where:.12g} (w={complex(w):.6g}): crossing form is degenerate"
            )
        return int(np.sum(ev > 0) - np.sum(ev < 0)), len(ev)

    def _interior_contribution(self, t: float, w: complex) -> tuple[Fraction, int]:
        j = int(np.argmin(np.abs(self.breaks - t)))
        if abs(self.breaks[j] - t) <= 1e-10:
            # crossing at a jump of the generator: half of each one-sided form
            tb = float(self.breaks[j])
            m = self.flow.matrix(tb)
            left = self.flow.generator(max(0.0, tb - 1e-12))
            right = self.flow.generator(tb)
            s1, k = self._signature(m, w, left, tb)
            s2, _ = self._signature(m, w, right, tb)
            return Fraction(s1 + s2, 2), k
        s, k = self._signature(self.flow.matrix(t), w, self.flow.generator(t), t)
        return Fraction(s), k

    def _group_contribution(self, group: list[float], w: complex) -> tuple[Fraction, int]:
        """Joint contribution of crossings close enough for their kernels to blur.

        At a crossing, the singular value belonging to a nearby crossing is
        only ``slope * distance`` and may fall under the kernel threshold, so
        one direction can be counted at two crossings.  That shows up as
        linearly dependent kernels; the group is then scored once, by the
        crossing form on as many of the smallest singular directions at its
        centre as the kernels span together.
        """
        parts = [self._interior_contribution(t, w) for t in group]
        single = (sum((c for c, _ in parts), Fraction(0)), sum(k for _, k in parts))
        if any(np.min(np.abs(self.breaks - t)) <= 1e-10 for t in group):
            return single
        bases = np.concatenate([self._kernel(self.flow.matrix(t), w) for t in group], axis=1)
        span = int(np.sum(np.linalg.svd(bases, compute_uv=False) > self.overlap_tol))
        if span == single[1]:
            return single
        tc = 0.5 * (group[0] + group[-1])
        sig, k = self._signature(self.flow.matrix(tc), w, self.flow.generator(tc), tc, span)
        return Fraction(sig), k

    def _zeros(self, w: complex, is_one: bool) -> list[float]:
        s = self._smins(self.mats, w)
        ts = self.ts
        keep = s[:-1] + s[1:] <= self.lip * np.diff(ts)
        lo, hi = ts[:-1][keep], ts[1:][keep]
        slo, shi, lip = s[:-1][keep], s[1:][keep], self.lip[keep]
        leaves: list[np.ndarray] = []
        while lo.size:
            if lo.size > self.budget:
                raise CrossingResolutionFailure(
                    f"crossings with w={complex(w):.6g} are not isolated (too many candidate intervals)"
                )
            done = hi - lo <= self.leaf
            leaves.append(np.stack([lo[done], hi[done], slo[done], shi[done]], axis=1))
            lo, hi, slo, shi, lip = (x[~done] for x in (lo, hi, slo, shi, lip))
            if not lo.size:
                break
            mid = 0.5 * (lo + hi)
            sm = self._smins(self.flow.matrices(mid), w)
            lo2 = np.concatenate([lo, mid])
            hi2 = np.concatenate([mid, hi])
            s1 = np.concatenate([slo, sm])
            s2 = np.concatenate([sm, shi])
            l2 = np.concatenate([lip, lip])
            ok = s1 + s2 <= l2 * (hi2 - lo2)
            lo, hi, slo, shi, lip = (x[ok] for x in (lo2, hi2, s1, s2, l2))
        if not leaves:
            return []
        leaf_arr = np.concatenate(leaves)
        leaf_arr = leaf_arr[np.argsort(leaf_arr[:, 0])]
        clusters: list[list[np.ndarray]] = []
        for row in leaf_arr:
            if clusters and row[0] <= clusters[-1][-1][1] + 1e-12:
                clusters[-1].append(row)
            else:
                clusters.append([row])
        zeros: list[float] = []
        for rows in clusters:
            for a, b in self._dips(np.array(rows)):
                if is_one and a <= 0.0:
                    a = b  # the dip touching t = 0 is the start crossing
                    if b <= 2 * self.leaf:
                        continue
                t, v = self._refine(w, max(0.0, a - self.leaf), min(1.0, b + self.leaf))
                if v <= self.tol.crossing_tol * self._scale(self.flow.matrix(t)):
                    if is_one and t <= 1e-9:
                        continue
                    if not any(abs(t - z) <= 10 * self.leaf for z in zeros):
                        zeros.append(t)
        return sorted(zeros)

    # -- main entry points -----------------------------------------------------

    def crossings(self, w: complex, start_weight: Fraction, end_weight: Fraction) -> list[Crossing]:
        """All crossings with ``Gamma(t) - w I`` singular on ``[0, 1]``.

        The start contribution (only for ``w = 1``) is ``start_weight`` times
        the signature of ``A(0)``; an endpoint crossing is weighted by
        ``end_weight``.
        """
        w = complex(w)
        is_one = abs(w - 1.0) < 1e-14
        out: list[Crossing] = []
        if is_one:
            sig, k = self._signature(np.eye(self.mats.shape[-1]), 1.0, self.flow.generator(0.0), 0.0)
            out.append(Crossing(0.0, k, start_weight * sig, "start"))
        end_m = self.mats[-1]
        end_hit = _smin(end_m, w) <= self.tol.crossing_tol * self._scale(end_m)
        groups: list[list[float]] = []
        for t in self._zeros(w, is_one):
            if t >= 1.0 - 1e-9:
                continue
            if groups and t - groups[-1][-1] <= self.group_gap:
                groups[-1].append(t)
            else:
                groups.append([t])
        for g in groups:
            if len(g) == 1:
                c, k = self._interior_contribution(g[0], w)
            else:
                c, k = self._group_contribution(g, w)
            out.append(Crossing(g[0], k, c, "interior"))
        if end_hit:
            sig, k = self._signature(end_m, w, self.flow.generator(1.0), 1.0)
            out.append(Crossing(1.0, k, end_weight * sig, "end"))
        return out

    def index(
        self, w: complex, start_weight: Fraction = Fraction(1, 2), end_weight: Fraction = Fraction(1, 2)
    ) -> Fraction:
        return sum((c.contribution for c in self.crossings(w, start_weight, end_weight)), Fraction(0))


# ---------------------------------------------------------------------------
# Souriau-map engine
# ---------------------------------------------------------------------------


def _graph_unitaries(mats: np.ndarray) -> np.ndarray:
    """Unitary frames of the graph Lagrangians ``{(Cx, Gamma x)}``."""
    k, dim, _ = mats.shape
    n = dim // 2
    c = np.diag(np.concatenate([np.ones(n), -np.ones(n)]))
    frame = np.concatenate([np.broadcast_to(c, mats.shape), mats], axis=1)
    q, _ = np.linalg.qr(frame)
    qrows = np.r_[0:n, dim : dim + n]
    prows = np.r_[n:dim, dim + n : 2 * dim]
    return q[:, qrows, :] + 1j * q[:, prows, :]


def _relative_souriau_eigs(mats: np.ndarray, u_ref: np.ndarray) -> np.ndarray:
    u = _graph_unitaries(mats)
    x = u_ref.conj().T[None] @ u
    w = x @ np.swapaxes(x, -1, -2)
    return np.linalg.eigvals(w)


def _half_floor(phi: float, snap: float) -> Fraction:
    x = phi / TWO_PI
    r = round(x)
    if abs(x - r) <= snap:
        return Fraction(int(r))
    return Fraction(2 * math.floor(x) + 1, 2)


def souriau_index(flow: _Flow, tol: Tolerances, snap: float = 1e-7, max_depth: int = 40) -> Fraction:
    """Robbin-Salamon index of ``Gamma`` from the Souriau-map eigenvalue winding.

    The graph of ``Gamma(t)`` is compared with the graph of the identity
    (the diagonal).  The relative Souriau map has eigenvalue ``1`` exactly on
    ``ker(Gamma(t) - I)``; each continuously tracked angle ``phi_j`` with
    ``phi_j(0) = 0`` contributes ``(floor + ceil)(phi_j(1) / 2 pi) / 2``.
    """
    dim = 2 * flow.n
    u_ref = _graph_unitaries(np.eye(dim)[None])[0]
    ts = scan_times(flow, tol)
    mats = flow.matrices(ts)
    mats[0] = np.eye(dim)
    eigs = _relative_souriau_eigs(mats, u_ref)

    angles = np.zeros(dim)
    prev = eigs[0]
    prev_t = ts[0]
    stack = [(t, e) for t, e in zip(ts[1:][::-1], eigs[1:][::-1])]
    depth = {}
    while stack:
        t, e = stack.pop()
        delta = np.angle(e[None, :] / prev[:, None])
        rows, cols = linear_sum_assignment(np.abs(delta))
        step = delta[rows, cols]
        if np.abs(step).max() > 0.2 and depth.get(prev_t, 0) < max_depth:
            mid = 0.5 * (prev_t + t)
            me = _relative_souriau_eigs(flow.matrices(np.array([mid])), u_ref)[0]
            depth[prev_t] = depth.get(prev_t, 0) + 1
            stack.append((t, e))
            stack.append((mid, me))
            continue
        order = np.empty(dim, dtype=int)
        order[rows] = cols
        angles = angles + step
        prev = e[order]
        prev_t = t
    total = sum((_half_floor(float(p), snap) for p in angles), Fraction(0))
    return total


# ---------------------------------------------------------------------------
# Hermitian Souriau engine (any unit w)
# ---------------------------------------------------------------------------


def _hermitian_split(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal bases of the ``+1`` / ``-1`` eigenspaces of ``i diag(J0, -J0)``."""
    dim = 2 * n
    j0 = np.block([[np.zeros((n, n)), -np.eye(n)], [np.eye(n), np.zeros((n, n))]])
    big = np.zeros((2 * dim, 2 * dim))
    big[:dim, :dim] = j0
    big[dim:, dim:] = -j0
    vals, vecs = np.linalg.eigh(1j * big)
    return vecs[:, vals > 0], vecs[:, vals < 0]


@dataclass
class TwistedWinding:
    """Outcome of :meth:`SouriauTracker.index`."""

    value: Fraction
    end_dim: int  # eigenvalues of the relative map at angle 0 when t = 1


class SouriauTracker:
    """Twisted Robbin-Salamon indices ``sum over crossings of Gamma(t) - w I``.

    The graph of ``Gamma(t)`` and the graph of ``w I`` are Lagrangian for the
    Hermitian form ``omega + (-omega)`` on ``C^{2n} + C^{2n}``.  A Lagrangian
    is the graph of a unitary map ``U`` from the positive to the negative
    eigenspace of ``i diag(J0, -J0)``; the intersection of two Lagrangians
    has the dimension of ``ker(U_1 - U_2)``.  So the eigenvalues of
    ``W(t) = U_w^* U(t)`` hit ``1`` exactly at the crossings, and each
    crossing moves them through ``1`` in the direction of the crossing form.
    The index is the net number of passes, with half weights for eigenvalues
    sitting at ``1`` at either end.  Clustered or non-regular crossings need
    no special treatment, which makes this the engine of choice for the
    perturbed, non-degenerate paths behind the lower and upper extensions.

    The matrices on the scan grid are computed once and shared by all ``w``.
    """

    max_step = 0.2
    max_depth = 40

    def __init__(self, flow: _Flow, tol: Tolerances):
        self.flow = flow
        self.tol = tol
        self.n = flow.n
        self.ts = scan_times(flow, tol)
        mats = flow.matrices(self.ts)
        mats[0] = np.eye(2 * self.n)
        self.mats = mats
        self.p, self.q = _hermitian_split(self.n)
        self._u = self._unitaries(mats)

    def _unitaries(self, mats: np.ndarray) -> np.ndarray:
        dim = 2 * self.n
        p1, p2 = self.p[:dim].conj().T, self.p[dim:].conj().T
        q1, q2 = self.q[:dim].conj().T, self.q[dim:].conj().T
        a = p1[None] + p2[None] @ mats
        b = q1[None] + q2[None] @ mats
        # U = B A^{-1}, computed as (A^{-T} B^T)^T
        return np.swapaxes(np.linalg.solve(np.swapaxes(a, -1, -2), np.swapaxes(b, -1, -2)), -1, -2)

    def _dets(self, ts: np.ndarray, uw: np.ndarray) -> np.ndarray:
        d = np.linalg.det(uw[None] @ self._unitaries(self.flow.matrices(ts)))
        return d / np.abs(d)

    def winding(self, w: complex) -> tuple[float, np.ndarray, np.ndarray]:
        """Continuous change of ``arg det W`` and the eigenvalues of ``W`` at both ends.

        Intervals on which ``arg det W`` moves by more than ``max_step`` are
        bisected until it does not.
        """
        w = complex(w)
        uw = self._unitaries(w * np.eye(2 * self.n)[None].astype(complex))[0].conj().T
        dets = np.linalg.det(uw[None] @ self._u)
        dets = dets / np.abs(dets)
        lo, hi = self.ts[:-1], self.ts[1:]
        dlo, dhi = dets[:-1], dets[1:]
        total = 0.0
        for _ in range(self.max_depth):
            steps = np.angle(dhi / dlo)
            ok = np.abs(steps) <= self.max_step
            total += float(steps[ok].sum())
            if ok.all():
                break
            lo, hi, dlo, dhi = lo[~ok], hi[~ok], dlo[~ok], dhi[~ok]
            mid = 0.5 * (lo + hi)
            dmid = self._dets(mid, uw)
            lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
            dlo, dhi = np.concatenate([dlo, dmid]), np.concatenate([dmid, dhi])
        else:
            raise CrossingResolutionFailure("Souriau winding did not resolve within the depth limit")
        m0 = np.linalg.eigvals(uw @ self._u[0])
        m1 = np.linalg.eigvals(uw @ self._u[-1])
        return total, m0, m1

    def index(self, w: complex, snap: float = 1e-7) -> TwistedWinding:
        """Twisted index with half weights at both ends.

        With ``phi_j`` the continuous eigen-angles of ``W`` and ``theta_j`` their
        principal values in ``[0, 2 pi)``, ``sum floor(phi_j(1) / 2 pi)`` equals
        ``(sum theta_j(0) + winding - sum theta_j(1)) / 2 pi``, so no
        individual eigenvalue has to be followed.
        """
        total, m0, m1 = self.winding(w)

        def principal(eigs: np.ndarray) -> tuple[float, int]:
            th = np.mod(np.angle(eigs), TWO_PI)
            zero = (th <= snap * TWO_PI) | (th >= TWO_PI * (1 - snap))
            return float(th[~zero].sum()), int(zero.sum())

        s0, z0 = principal(m0)
        s1, z1 = principal(m1)
        turns = (s0 + total - s1) / TWO_PI
        r = round(turns)
        if abs(turns - r) > 1e-6:
            raise CrossingResolutionFailure(f"Souriau winding {turns:.9f} is not integral")
        dim = len(m0)
        value = Fraction(r) + Fraction((dim - z1) - (dim - z0), 2)
        return TwistedWinding(_SIGN * value, z1)


# orientation of the Hermitian model relative to the crossing-form convention,
# fixed by the positive rotation exp(J0 t) (see the tests)
_SIGN = -1
