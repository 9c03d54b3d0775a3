"""Good toric contact manifolds from their moment cones.

A moment cone ``C = {x : <x, nu_j> >= 0}`` is given by primitive integer
normals.  Everything here is exact: face lattices come from integer
determinants and Smith forms, Reeb vectors live in the Q-span of square roots
(:mod:`reeb_index.surd`) and floors of rotation numbers are decided by exact
sign tests.

For a Reeb vector ``R = sum a_j nu_j`` (all ``a_j > 0``) generating a dense
subgroup of the torus, the closed orbits are the iterates of one simple orbit
per edge of ``C``.  Its lift to ``C^d`` rotates coordinate ``i`` by
``2 pi c_i`` over one period, and the Robbin-Salamon index of the ``N``-th
iterate is ``sum_i rho(N c_i)`` with ``rho(c) = 2c`` for integral ``c`` and
``2 floor(c) + 1`` otherwise.  The differential of cylindrical contact
homology vanishes because all indices share the parity of ``n``, so the ranks
count orbits by degree.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
import sympy
from scipy.optimize import linprog

from . import _lattice as lat
from .errors import (
    CutoffTooSmall,
    DegenerateEdgeBasis,
    DegenerateReebVector,
    EngineDisagreement,
    FaceFacetCountMismatch,
    NonPositiveMeanIndex,
    NonPrimitiveNormal,
    NotInInteriorDualCone,
    NotInSubgroupK,
    NotIntegralBasisCompletable,
    NotStrictlyConvex,
    PerturbationFailure,
    RedundantNormal,
    SchemaError,
    UnsupportedCone,
)
from .index import rs_index
from .surd import LinearSurd, SurdRatio, proportional, rank_over_q
from .sympath import SymplecticPath, rotation_path

__all__ = [
    "MomentCone",
    "Edge",
    "FaceLattice",
    "ReebVector",
    "EdgeRotations",
    "EdgeOrbitIndex",
    "HCTable",
    "ConvexityBound",
    "sphere_cone",
    "ck_cone",
    "check_good_cone",
    "fundamental_group",
    "grading_covector",
    "is_reeb_vector",
    "edge_orbit_rotations",
    "rho",
    "orbit_rs_index",
    "lifted_linear_path",
    "hc_table",
    "nondegenerate_reeb_near",
    "k_minus",
    "convexity_lower_bound",
    "transform_cone",
]


# ---------------------------------------------------------------------------
# cones and face lattices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MomentCone:
    """Cone ``{x : <x, nu_j> >= 0}`` in ``R^{n+1}`` with integer normals."""

    normals: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in v) for v in self.normals)
        if not rows:
            raise SchemaError("a cone needs at least one normal")
        if len({len(v) for v in rows}) != 1:
            raise SchemaError("normals must all have the same length")
        if len(rows[0]) < 2:
            raise SchemaError("ambient dimension must be at least 2")
        for v, raw in zip(rows, self.normals):
            if any(int(x) != x for x in raw):
                raise SchemaError("normals must be integer vectors")
        object.__setattr__(self, "normals", rows)

    @property
    def dim(self) -> int:
        return len(self.normals[0])

    @property
    def n(self) -> int:
        return self.dim - 1

    @property
    def d(self) -> int:
        return len(self.normals)

    def to_json(self) -> dict:
        return {"dim": self.dim, "normals": [list(v) for v in self.normals]}

    @classmethod
    def from_json(cls, obj: dict) -> "MomentCone":
        if not isinstance(obj, dict) or set(obj) != {"dim", "normals"}:
            raise SchemaError('cone JSON must have exactly the keys "dim" and "normals"')
        normals = obj["normals"]
        if not isinstance(normals, list) or not all(
            isinstance(v, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in v) for v in normals
        ):
            raise SchemaError('"normals" must be a list of integer lists')
        cone = cls(tuple(tuple(v) for v in normals))
        if obj["dim"] != cone.dim:
            raise SchemaError(f'"dim" is {obj["dim"]} but normals have length {cone.dim}')
        return cone


def sphere_cone(n: int) -> MomentCone:
    """Moment cone of the standard contact sphere ``S^{2n+1}``."""
    rows = []
    for j in range(n):
        e = [0] * (n + 1)
        e[j] = 1
        rows.append(tuple(e))
    rows.append(tuple([-1] * n + [1]))
    return MomentCone(tuple(rows))


def ck_cone(k: int) -> MomentCone:
    """The cones ``C(k)`` of the toric contact structures on ``S^2 x S^3``."""
    return MomentCone(((1, 0, 1), (0, -1, 1), (0, k, 1), (-1, 2 * k - 1, 1)))


def transform_cone(cone: MomentCone, g: Sequence[Sequence[int]]) -> MomentCone:
    """Apply an integer matrix to all normals (unimodular ``g`` gives an equivalent cone)."""
    m = sympy.Matrix(g)
    if abs(m.det()) != 1:
        raise ValueError("transformation must be unimodular")
    return MomentCone(tuple(tuple(int(x) for x in m * sympy.Matrix(v)) for v in cone.normals))


@dataclass(frozen=True)
class Edge:
    """A ray of the cone: ``facets`` are the ``n`` facets containing it."""

    index: int
    facets: tuple[int, ...]
    direction: tuple[int, ...]


@dataclass(frozen=True)
class FaceLattice:
    """Faces of a certified good cone, keyed by codimension.

    Each face is recorded by the sorted tuple of facets containing it.
    """

    cone: MomentCone
    faces: dict[int, tuple[tuple[int, ...], ...]]
    edges: tuple[Edge, ...]

    def to_json(self) -> dict:
        return {
            "faces": {str(k): [list(f) for f in v] for k, v in sorted(self.faces.items())},
            "edges": [{"facets": list(e.facets), "direction": list(e.direction)} for e in self.edges],
        }


def _rays(cone: MomentCone) -> list[tuple[int, ...]]:
    rows = cone.normals
    out: list[tuple[int, ...]] = []
    for sub in itertools.combinations(range(cone.d), cone.n):
        e = lat.kernel_direction([rows[j] for j in sub])
        if e is None:
            continue
        vals = [lat.dot(v, e) for v in rows]
        if all(x >= 0 for x in vals):
            pass
        elif all(x <= 0 for x in vals):
            e = tuple(-x for x in e)
        else:
            continue
        if e not in out:
            out.append(e)
    return sorted(out)


def check_good_cone(cone: MomentCone) -> FaceLattice:
    """Certify that ``cone`` is good and return its face lattice.

    Checks, in order: primitive normals, no repeated normals, strict
    convexity (normals span), non-empty interior, every normal defines a
    facet, and every codimension-``k`` face (``1 <= k <= n``) lies on exactly
    ``k`` facets whose normals extend to a basis of ``Z^{n+1}``.

    Raises
    ------
    NonPrimitiveNormal, RedundantNormal, NotStrictlyConvex,
    FaceFacetCountMismatch, NotIntegralBasisCompletable
    """
    rows = cone.normals
    n, d = cone.n, cone.d
    for j, v in enumerate(rows):
        if lat.gcd_all(v) != 1:
            raise NonPrimitiveNormal(f"normal {j} = {list(v)} is not primitive")
    if len(set(rows)) != d:
        raise RedundantNormal("a normal is listed twice")
    if lat.rank(rows) < n + 1:
        raise NotStrictlyConvex("normals do not span; the cone contains a line")
    rays = _rays(cone)
    if lat.rank(rays) < n + 1:
        raise FaceFacetCountMismatch("the cone has empty interior")
    on_facet = [frozenset(i for i, r in enumerate(rays) if lat.dot(rows[j], r) == 0) for j in range(d)]
    for j in range(d):
        if lat.rank([rays[i] for i in on_facet[j]]) < n:
            raise RedundantNormal(f"normal {j} = {list(rows[j])} does not define a facet")
    # faces = non-empty intersections of facets, identified by their rays
    faces = set(on_facet)
    frontier = set(on_facet)
    while frontier:
        new = set()
        for a in frontier:
            for b in on_facet:
                c = a & b
                if c and c not in faces:
                    new.add(c)
        faces |= new
        frontier = new
    by_codim: dict[int, list[tuple[int, ...]]] = {}
    for f in sorted(faces, key=lambda s: sorted(s)):
        codim = n + 1 - lat.rank([rays[i] for i in f])
        facets = tuple(j for j in range(d) if f <= on_facet[j])
        if len(facets) != codim:
            raise FaceFacetCountMismatch(
                f"a codimension-{codim} face lies on {len(facets)} facets {list(facets)}"
            )
        if lat.nontrivial_factors([rows[j] for j in facets]):
            raise NotIntegralBasisCompletable(
                f"normals {list(facets)} of a codimension-{codim} face do not extend to a lattice basis"
            )
        by_codim.setdefault(codim, []).append(facets)
    edges = []
    for f in sorted(faces, key=lambda s: sorted(s)):
        if len(f) == 1:
            (ri,) = f
            facets = tuple(j for j in range(d) if f <= on_facet[j])
            edges.append((facets, rays[ri]))
    edges.sort()
    return FaceLattice(
        cone,
        {k: tuple(sorted(v)) for k, v in by_codim.items()},
        tuple(Edge(i, f, r) for i, (f, r) in enumerate(edges)),
    )


def fundamental_group(cone: MomentCone) -> tuple[int, ...]:
    """Invariant factors of ``Z^{n+1} / span(normals)``; empty means trivial."""
    return lat.nontrivial_factors([list(col) for col in zip(*cone.normals)])


def grading_covector(cone: MomentCone) -> tuple[Fraction, ...] | None:
    """Rational ``c`` with ``<c, nu_j> = 1`` for all ``j``, if it exists.

    Its existence is what makes the orbit indices independent of the chosen
    lift, i.e. gives an integer grading.
    """
    a = sympy.Matrix(cone.normals)
    try:
        sol, params = a.gauss_jordan_solve(sympy.ones(cone.d, 1))
    except ValueError:
        return None
    sol = sol.subs({p: 0 for p in params})
    return tuple(Fraction(int(x.p), int(x.q)) for x in sol)


# ---------------------------------------------------------------------------
# Reeb vectors
# ---------------------------------------------------------------------------


def _surds(values: Iterable) -> tuple[LinearSurd, ...]:
    out = []
    for v in values:
        if isinstance(v, float):
            raise SchemaError("Reeb data must be exact: give rationals or surds as strings")
        out.append(LinearSurd.coerce(v))
    return tuple(out)


@dataclass(frozen=True)
class ReebVector:
    """A toric Reeb vector with its (positive) coefficients on the normals."""

    vector: tuple[LinearSurd, ...]
    coefficients: tuple[LinearSurd, ...]

    def to_json(self) -> dict:
        return {"coefficients": [str(a) for a in self.coefficients], "vector": [str(x) for x in self.vector]}

    @staticmethod
    def parse_json(obj: dict) -> dict:
        """Validate Reeb JSON; returns ``{"coefficients": ...}`` or ``{"vector": ...}``."""
        if not isinstance(obj, dict) or not obj or not set(obj) <= {"coefficients", "vector"}:
            raise SchemaError('Reeb JSON needs "coefficients" or "vector"')
        out = {}
        for key, vals in obj.items():
            if not isinstance(vals, list) or not all(isinstance(v, (str, int)) and not isinstance(v, bool) for v in vals):
                raise SchemaError(f'"{key}" must be a list of rationals written as strings')
            try:
                out[key] = _surds(str(v) for v in vals)
            except (ValueError, TypeError, sympy.SympifyError) as exc:
                raise SchemaError(f'cannot parse "{key}": {exc}') from exc
        return out


def _vector_of(cone: MomentCone, coeffs: Sequence[LinearSurd]) -> tuple[LinearSurd, ...]:
    return tuple(
        sum((a * int(v[k]) for a, v in zip(coeffs, cone.normals)), LinearSurd()) for k in range(cone.dim)
    )


def _analytic_center(cone: MomentCone, v: np.ndarray) -> np.ndarray:
    """Maximiser of ``sum log a_j`` on ``{a > 0 : sum a_j nu_j = v}`` (float)."""
    m = np.array(cone.normals, dtype=float).T
    d = cone.d
    # strictly feasible start: maximise the smallest coefficient
    res = linprog(
        np.r_[np.zeros(d), -1.0],
        A_ub=np.c_[-np.eye(d), np.ones(d)],
        b_ub=np.zeros(d),
        A_eq=np.c_[m, np.zeros(m.shape[0])],
        b_eq=v,
        bounds=[(None, None)] * d + [(None, 1.0)],
        method="highs",
    )
    a = res.x[:d]
    # Newton on the barrier restricted to the affine space
    _, s, vh = np.linalg.svd(m)
    null = vh[int(np.sum(s > 1e-12 * s[0])) :].T
    for _ in range(100):
        if null.shape[1] == 0:
            break
        g = null.T @ (1.0 / a)
        h = null.T @ np.diag(1.0 / a**2) @ null
        step = null @ np.linalg.solve(h, g)
        t = 1.0
        while np.any(a + t * step <= 0):
            t *= 0.5
        a = a + t * step
        if np.linalg.norm(t * step) < 1e-14 * max(1.0, np.linalg.norm(a)):
            break
    return a


def is_reeb_vector(
    cone: MomentCone,
    vector: Sequence | None = None,
    coefficients: Sequence | None = None,
    faces: FaceLattice | None = None,
) -> ReebVector:
    """Accept ``vector`` (or ``coefficients``) as a toric Reeb vector.

    A vector is accepted iff it pairs positively with every ray of the cone,
    i.e. lies in the interior of the cone spanned by the normals.  The
    witness coefficients are an exact positive solution close to the
    analytic centre of ``{a > 0 : sum a_j nu_j = v}``.

    Raises
    ------
    NotInInteriorDualCone
    """
    faces = faces or check_good_cone(cone)
    if coefficients is not None:
        coeffs = _surds(coefficients)
        if len(coeffs) != cone.d:
            raise SchemaError(f"expected {cone.d} coefficients, got {len(coeffs)}")
        if any(a.sign() <= 0 for a in coeffs):
            raise NotInInteriorDualCone("all coefficients must be positive")
        vec = _vector_of(cone, coeffs)
        if vector is not None and tuple(_surds(vector)) != vec:
            raise SchemaError("vector and coefficients disagree")
        return ReebVector(vec, coeffs)
    if vector is None:
        raise SchemaError("give a vector or coefficients")
    vec = _surds(vector)
    if len(vec) != cone.dim:
        raise SchemaError(f"expected a vector of length {cone.dim}")
    for e in faces.edges:
        if lat.dot(e.direction, vec).sign() <= 0:
            raise NotInInteriorDualCone(
                f"vector pairs non-positively with the ray {list(e.direction)}; it is not a positive combination of the normals"
            )
    approx = _analytic_center(cone, np.array([float(x) for x in vec]))
    m = sympy.Matrix(cone.normals).T
    proj = m.T * (m * m.T).inv()
    for den in (10**6, 10**12, 10**24):
        guess = [Fraction(float(a)).limit_denominator(den) for a in approx]
        resid = [vec[k] - sum(g * int(m[k, j]) for j, g in enumerate(guess)) for k in range(cone.dim)]
        coeffs = tuple(
            LinearSurd.coerce(guess[j])
            + sum((r * Fraction(int(proj[j, k].p), int(proj[j, k].q)) for k, r in enumerate(resid)), LinearSurd())
            for j in range(cone.d)
        )
        if all(a.sign() > 0 for a in coeffs):
            assert _vector_of(cone, coeffs) == vec
            return ReebVector(vec, coeffs)
    raise NotInInteriorDualCone("could not find a positive witness")  # pragma: no cover


# ---------------------------------------------------------------------------
# edge orbits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeRotations:
    """Lifted linear flow of the simple closed orbit over one edge.

    ``rotations[i]`` is the number of turns of coordinate ``z_i`` of ``C^d``
    over one period; ``b_edge`` are the coefficients of the Reeb vector on the
    normals of the edge and ``b`` the one on the completing vector ``eta``
    (so the period is ``2 pi / b``).
    """

    edge: Edge
    eta: tuple[int, ...]
    b_edge: tuple[LinearSurd, ...]
    b: LinearSurd
    lift: tuple[Fraction, ...]
    rotations: tuple[SurdRatio, ...]
    integral_lift: bool

    @property
    def period(self) -> float:
        return 2 * math.pi / float(self.b)

    @property
    def nondegenerate(self) -> bool:
        return all(not proportional(bj, self.b) for bj in self.b_edge)

    def rotation_sum(self) -> SurdRatio:
        return SurdRatio(sum((r.num for r in self.rotations), LinearSurd()), self.b)

    def mean_index(self) -> float:
        return 2 * float(self.rotation_sum())

    def to_json(self) -> dict:
        return {
            "edge": self.edge.index,
            "facets": list(self.edge.facets),
            "direction": list(self.edge.direction),
            "rotations": [float(r) for r in self.rotations],
            "period": self.period,
            "nondegenerate": self.nondegenerate,
        }


def edge_orbit_rotations(cone: MomentCone, faces: FaceLattice, reeb: ReebVector, edge: Edge) -> EdgeRotations:
    """Rotation numbers of the lifted simple orbit over ``edge``.

    Writes ``R = sum_j b_j nu_{l_j} + b eta`` in the basis formed by the edge
    normals and a completing vector ``eta`` with ``<eta, e> = 1`` (``e`` the
    primitive edge direction), lifts ``eta`` to ``eta~`` with ``beta(eta~) =
    eta`` (canonical Smith-form solution) and returns ``c = R~ / b`` where
    ``R~ = sum_j b_j e_{l_j} + b eta~``.

    Raises
    ------
    DegenerateEdgeBasis
        If the edge normals do not extend to a lattice basis.
    """
    rows = [cone.normals[j] for j in edge.facets]
    eta0 = lat.basis_completion(rows)
    if eta0 is None:
        raise DegenerateEdgeBasis(f"normals {list(edge.facets)} do not extend to a lattice basis")
    pair = lat.dot(eta0, edge.direction)
    if abs(pair) != 1:
        raise DegenerateEdgeBasis("completing vector does not pair to +-1 with the edge")
    eta = tuple(pair * x for x in eta0)
    basis = sympy.Matrix(rows + [list(eta)])
    inv_t = basis.T.inv()
    coords = [
        sum((reeb.vector[k] * Fraction(int(inv_t[i, k].p), int(inv_t[i, k].q)) for k in range(cone.dim)), LinearSurd())
        for i in range(cone.dim)
    ]
    b_edge, b = tuple(coords[:-1]), coords[-1]
    if b.sign() <= 0:
        raise DegenerateEdgeBasis("Reeb vector does not move along the edge")
    lift_s, integral = lat.solve_lattice(cone.normals, eta)
    lift = tuple(x.rational() for x in lift_s)
    nums = [b * q for q in lift]
    for j, f in enumerate(edge.facets):
        nums[f] = nums[f] + b_edge[j]
    rotations = tuple(SurdRatio(x, b) for x in nums)
    if _vector_of(cone, nums) != reeb.vector:
        raise EngineDisagreement("lifted Reeb vector does not project to the Reeb vector")
    return EdgeRotations(edge, eta, b_edge, b, lift, rotations, integral)


def rho(c: SurdRatio | Fraction | int) -> int:
    """Index contribution of one coordinate turning ``c`` times."""
    if isinstance(c, SurdRatio):
        fl = c.floor()
        return 2 * fl if c.compare(fl) == 0 else 2 * fl + 1
    c = Fraction(c)
    fl = math.floor(c)
    return 2 * fl if c == fl else 2 * fl + 1


@dataclass(frozen=True)
class EdgeOrbitIndex:
    """Robbin-Salamon index of the ``N``-th iterate of an edge orbit."""

    edge: int | None
    N: int
    rotations: tuple[float, ...]
    mu_rs: Fraction
    n: int | None

    @property
    def parity_ok(self) -> bool | None:
        if self.n is None:
            return None
        return self.mu_rs.denominator == 1 and (int(self.mu_rs) - self.n) % 2 == 0

    def to_json(self) -> dict:
        mu = self.mu_rs
        return {
            "edge": self.edge,
            "N": self.N,
            "rotations": list(self.rotations),
            "mu_rs": int(mu) if mu.denominator == 1 else f"{mu.numerator}/{mu.denominator}",
        }


def orbit_rs_index(rotations: EdgeRotations | Sequence, N: int = 1, n: int | None = None) -> EdgeOrbitIndex:
    """``sum_i rho(N c_i)`` for the ``N``-th iterate.

    ``rotations`` is an :class:`EdgeRotations` or a plain sequence of
    rotation numbers (ints, fractions, :class:`SurdRatio`).
    """
    if N < 1:
        raise ValueError("N must be positive")
    if isinstance(rotations, EdgeRotations):
        cs = list(rotations.rotations)
        edge = rotations.edge.index
        n = len(rotations.edge.facets) if n is None else n
    else:
        cs = [c if isinstance(c, SurdRatio) else Fraction(c) for c in rotations]
        edge = None
    mu = sum(rho(c * N) for c in cs)
    return EdgeOrbitIndex(edge, N, tuple(float(c) * N for c in cs), Fraction(mu), n)


def lifted_linear_path(rotations: EdgeRotations | Sequence, N: int = 1) -> SymplecticPath:
    """The lifted linear flow over ``N`` periods as a path in ``Sp(2d)``."""
    cs = rotations.rotations if isinstance(rotations, EdgeRotations) else rotations
    return rotation_path([2 * math.pi * N * float(c) for c in cs])


def check_against_engine(rotations: EdgeRotations | Sequence, N: int = 1) -> bool:
    """Whether the combinatorial index equals :func:`rs_index` of the lifted path."""
    return orbit_rs_index(rotations, N).mu_rs == rs_index(lifted_linear_path(rotations, N))


# ---------------------------------------------------------------------------
# contact homology
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HCTable:
    """Ranks of cylindrical contact homology by degree, up to ``cutoff``.

    Degrees above ``cutoff`` are unknown (``rank`` returns ``None``), never
    zero.  ``k_plus`` is ``None`` when homology is non-zero in arbitrarily high
    degrees (always the case with positive mean indices).
    """

    ranks: dict[int, int]
    k_minus: int | None
    k_plus: int | None
    cutoff: int
    cone: MomentCone | None = None
    reeb: ReebVector | None = None
    generators: tuple[tuple[int, int, int], ...] = field(default=())

    def rank(self, degree: int) -> int | None:
        if degree > self.cutoff:
            return None
        return self.ranks.get(degree, 0)

    def to_json(self) -> dict:
        return {
            "ranks": {str(k): v for k, v in sorted(self.ranks.items())},
            "k_minus": self.k_minus,
            "k_plus": self.k_plus,
            "cutoff": self.cutoff,
        }


def _check_reeb_nondegenerate(cone: MomentCone, reeb: ReebVector) -> None:
    if rank_over_q(reeb.vector) < cone.dim:
        raise DegenerateReebVector(
            "coordinates of the Reeb vector are rationally dependent; its flow is not dense in the torus"
        )


def hc_table(
    cone: MomentCone, reeb: ReebVector, degree_max: int, faces: FaceLattice | None = None
) -> HCTable:
    """Cylindrical contact homology ranks in degrees ``<= degree_max``.

    Enumerates every edge orbit and iterate whose index can be at most
    ``degree_max``; the bound ``mu(N) >= 2 N sum(c) - n`` (each coordinate
    contributes at least ``2 N c_i - 1``, and ``n`` of them are irrational)
    makes the enumeration finite and complete.

    Raises
    ------
    UnsupportedCone
        If the normals admit no grading covector.
    DegenerateReebVector
        If the Reeb flow is not dense or an edge orbit is degenerate.
    NonPositiveMeanIndex
        If an edge orbit has non-positive mean index.
    CutoffTooSmall
        If no orbit has degree ``<= degree_max``.
    """
    faces = faces or check_good_cone(cone)
    if grading_covector(cone) is None:
        raise UnsupportedCone("normals do not lie on an affine hyperplane; no integer grading")
    _check_reeb_nondegenerate(cone, reeb)
    n = cone.n
    gens: list[tuple[int, int, int]] = []
    for e in faces.edges:
        rot = edge_orbit_rotations(cone, faces, reeb, e)
        if not rot.nondegenerate:
            raise DegenerateReebVector(f"orbit over edge {e.index} is degenerate")
        total = rot.rotation_sum()
        if total.compare(0) <= 0:
            raise NonPositiveMeanIndex(f"orbit over edge {e.index} has non-positive mean index")
        N = 1
        while (total * (2 * N)).compare(degree_max + n) <= 0:
            idx = orbit_rs_index(rot, N, n)
            if not idx.parity_ok:
                raise EngineDisagreement(
                    f"orbit index {idx.mu_rs} over edge {e.index} breaks the constant parity law"
                )
            if idx.mu_rs <= degree_max:
                gens.append((e.index, N, int(idx.mu_rs)))
            N += 1
    if not gens:
        raise CutoffTooSmall(f"no closed orbit has degree <= {degree_max}")
    kmin = min(g[2] for g in gens)
    # every orbit of degree <= degree_max was enumerated, so lower degrees are known zeros
    ranks = {deg: 0 for deg in range(min(0, kmin), degree_max + 1)}
    for g in gens:
        ranks[g[2]] += 1
    return HCTable(ranks, kmin, None, degree_max, cone, reeb, tuple(sorted(gens, key=lambda g: (g[2], g[0], g[1]))))


_PRIMES = list(sympy.primerange(2, 600))


def nondegenerate_reeb_near(
    cone: MomentCone,
    base: ReebVector | None = None,
    seed: int = 0,
    faces: FaceLattice | None = None,
    retries: int = 12,
) -> ReebVector:
    """Perturb ``base`` (default ``sum nu_j``) to a non-degenerate Reeb vector.

    ``a_j <- a_j + delta * sqrt(p_j)`` with distinct primes ``p_j`` drawn from
    a seeded shuffle; ``delta`` starts at ``1/100`` of the smallest
    coefficient and shrinks by ten until the flow is dense, every edge orbit
    is non-degenerate and every mean index is positive.

    Raises
    ------
    PerturbationFailure
    """
    faces = faces or check_good_cone(cone)
    if base is None:
        base = is_reeb_vector(cone, coefficients=[1] * cone.d, faces=faces)
    primes = random.Random(seed).sample(_PRIMES, cone.d)
    amin = min(Fraction(float(a)).limit_denominator(1000) for a in base.coefficients)
    delta = max(amin, Fraction(1, 1000)) / 100
    for _ in range(retries):
        coeffs = tuple(a + LinearSurd.sqrt(p, delta) for a, p in zip(base.coefficients, primes))
        try:
            reeb = is_reeb_vector(cone, coefficients=coeffs, faces=faces)
            _check_reeb_nondegenerate(cone, reeb)
            rots = [edge_orbit_rotations(cone, faces, reeb, e) for e in faces.edges]
            if all(r.nondegenerate and r.rotation_sum().compare(0) > 0 for r in rots):
                return reeb
        except (NotInInteriorDualCone, DegenerateReebVector):
            pass
        delta /= 10
    raise PerturbationFailure("no non-degenerate perturbation found")


def k_minus(cone: MomentCone, reeb: ReebVector | None = None, seed: int = 0) -> int:
    """Lowest degree with non-zero contact homology."""
    faces = check_good_cone(cone)
    reeb = reeb or nondegenerate_reeb_near(cone, seed=seed, faces=faces)
    cutoff = 2 * cone.d
    while True:
        try:
            return hc_table(cone, reeb, cutoff, faces).k_minus  # type: ignore[return-value]
        except CutoffTooSmall:
            cutoff *= 2


# ---------------------------------------------------------------------------
# convexity bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvexityBound:
    """Lower bound for the lower index of orbits of convex toric contact forms."""

    turns: tuple[Fraction, ...]
    reeb_lattice_vector: tuple[int, ...]
    lift: tuple[int, ...]
    mu_rs: int
    bound: int
    k_minus: int
    dominates_k_minus: bool

    def to_json(self) -> dict:
        return {
            "turns": [str(t) for t in self.turns],
            "reeb_vector": list(self.reeb_lattice_vector),
            "lift": list(self.lift),
            "mu_rs": self.mu_rs,
            "bound": self.bound,
            "k_minus": self.k_minus,
            "bound_ge_k_minus": self.dominates_k_minus,
        }


def convexity_lower_bound(cone: MomentCone, turns: Sequence, seed: int = 0) -> ConvexityBound:
    """Index bound attached to a return element ``lambda`` of ``K``.

    ``turns[i] = lambda_i / 2 pi`` in ``(0, 1]``.  The quadratic Hamiltonian
    ``sum lambda_i |z_i|^2 / 2`` minus the moment map of ``K`` generates an
    integral vector ``b`` with ``beta(b) = R_lambda = sum turns_i nu_i``; its
    closed orbits have index ``2 sum b_i`` and every closed orbit of a convex
    toric contact form with return element ``lambda`` has lower index at
    least ``2 sum b_i - n``.  The bound is cross-checked against the index of
    an edge orbit of the perturbation ``b_j -> b_j - eps_j`` on the edge
    normals, and compared with ``k_minus``.

    Raises
    ------
    NotInSubgroupK
        If some turn is outside ``(0, 1]`` or ``R_lambda`` is not integral.
    UnsupportedCone
        If ``R_lambda`` has no integral lift (non-trivial fundamental group)
        or the cone has no grading covector.
    """
    faces = check_good_cone(cone)
    ts = tuple(Fraction(t) for t in turns)
    if len(ts) != cone.d:
        raise SchemaError(f"expected {cone.d} angles")
    if any(not (0 < t <= 1) for t in ts):
        raise NotInSubgroupK("angles must lie in (0, 2 pi]")
    r = [sum((t * v[k] for t, v in zip(ts, cone.normals)), Fraction(0)) for k in range(cone.dim)]
    if any(x.denominator != 1 for x in r):
        raise NotInSubgroupK(f"sum (lambda_i / 2 pi) nu_i = {[str(x) for x in r]} is not integral")
    if grading_covector(cone) is None:
        raise UnsupportedCone("normals do not lie on an affine hyperplane; no integer grading")
    sol, integral = lat.solve_lattice(cone.normals, r)
    if not integral:
        raise UnsupportedCone("R_lambda has no integral lift; the manifold is not simply connected")
    b = [int(x.rational()) for x in sol]
    mu = 2 * sum(b)
    n = cone.n
    for e in faces.edges:
        eps = [Fraction(1, 1000 * (i + 2)) for i in range(n)]
        cs = [Fraction(x) for x in b]
        for i, f in enumerate(e.facets):
            cs[f] -= eps[i]
        if orbit_rs_index(cs).mu_rs != mu - n:
            raise EngineDisagreement(f"perturbed orbit over edge {e.index} does not have index mu - n")
    km = k_minus(cone, seed=seed)
    return ConvexityBound(ts, tuple(int(x) for x in r), tuple(b), mu, mu - n, km, mu - n >= km)
