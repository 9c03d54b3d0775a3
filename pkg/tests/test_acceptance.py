"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (visible with ``pytest -s``)
before asserting, so a run doubles as a report.
"""

import math
from fractions import Fraction

import numpy as np
import sympy

from reeb_index import toric
from reeb_index.bott import all_splitting_numbers, bott_function, elliptic_certificate
from reeb_index.corpus import corpus
from reeb_index.errors import PinchingViolated, ReebIndexError
from reeb_index.estimates import (
    PinchingData,
    PrequantizationData,
    hr_linear_path,
    ind_hr,
    perturbed_orbit_index,
    pinched_index_bound,
    prequant_hc,
    projective_space_betti,
)
from reeb_index.index import (
    cz_index,
    cz_minus,
    cz_plus,
    maslov_index,
    mean_index,
    path_nullity,
)
from reeb_index.sympath import SymplecticPath, direct_sum, inverse_path, iterate_path, product_path, rotation_path

from conftest import random_symmetric

TWO_PI = 2 * math.pi


def report(criterion: int, title: str, failures: list) -> None:
    status = "PASS" if not failures else "FAIL"
    detail = "" if not failures else f" ({len(failures)} failures, first: {failures[0]})"
    print(f"\n[{status}] criterion {criterion}: {title}{detail}")
    assert not failures


def auto_table(cone, cutoff):
    return toric.hc_table(cone, toric.nondegenerate_reeb_near(cone), cutoff)


def sphere_ranks(n, degrees):
    return {d: int(d >= n + 2 and (d - n) % 2 == 0) for d in degrees}


def test_sphere_contact_homology():
    failures = []
    for n in (1, 2, 3):
        table = auto_table(toric.sphere_cone(n), n + 12)
        expected = sphere_ranks(n, table.ranks)
        if table.ranks != expected or set(range(n + 13)) - set(table.ranks):
            failures.append((n, table.ranks))
    report(1, "sphere tables have rank 1 exactly at n+2+2j", failures)


def test_s2xs3_family():
    failures = []
    for k in range(4):
        table = auto_table(toric.ck_cone(k), 12)
        expected = {d: (k if d == 0 else 2 * k + 1 if d == 2 else 2 * k + 2 if d % 2 == 0 else 0)
                    for d in range(13)}
        got = {d: table.rank(d) for d in range(13)}
        if got != expected or any(r for d, r in table.ranks.items() if d < 0):
            failures.append((k, got))
        if table.k_minus != (2 if k == 0 else 0):
            failures.append((k, "k_minus", table.k_minus))
    report(2, "C(k) tables and k_minus", failures)


def test_combinatorial_and_numerical_indices_agree():
    cones = [toric.sphere_cone(n) for n in (1, 2, 3)] + [toric.ck_cone(k) for k in range(4)]
    failures, checked = [], 0
    for c in cones:
        faces = toric.check_good_cone(c)
        reeb = toric.nondegenerate_reeb_near(c, faces=faces)
        for e in faces.edges:
            rot = toric.edge_orbit_rotations(c, faces, reeb, e)
            for N in range(1, 11):
                checked += 1
                if not toric.check_against_engine(rot, N):
                    failures.append((c.normals, e.index, N))
    assert checked > 0
    report(3, f"orbit_rs_index equals rs_index on {checked} edge iterates", failures)


def ind_hr_cases():
    """50 seeded ``(n, S, R)``; every fifth case is an exact resonance."""
    rng = np.random.default_rng(11)
    cases = []
    for i in range(50):
        n = int(rng.integers(1, 4))
        R = sympy.Rational(int(rng.integers(5, 16)), 10)
        if i % 5 == 0:
            S = 2 * sympy.pi * R**2 * int(rng.integers(1, 4))
        else:
            S = sympy.Rational(int(rng.integers(20, 2000)), 100)
        cases.append((n, S, R))
    return cases


def test_round_flow_index():
    cases = ind_hr_cases()
    resonant = sum(bool((S / (2 * sympy.pi * R**2)).is_integer) for _, S, R in cases)
    failures = []
    for n, S, R in cases:
        closed = ind_hr(n, S, R)
        engine = cz_minus(hr_linear_path(n, float(S), float(R)))
        if closed != engine:
            failures.append((n, str(S), str(R), closed, engine))
    assert resonant == 10
    report(4, "closed-form ind_hr equals cz_minus on 50 cases (10 resonant)", failures)


def random_path(rng, n):
    pieces = int(rng.integers(1, 4))
    breaks = np.concatenate([[0.0], np.sort(rng.uniform(0.1, 0.9, size=pieces - 1)), [1.0]])
    # moderate generators: the inverse path is generated by -Gamma^T A Gamma, whose norm grows like |Gamma|^2
    gens = [random_symmetric(rng, 2 * n, 1.5) + rng.uniform(-4, 4) * np.eye(2 * n) for _ in range(pieces)]
    return SymplecticPath.piecewise_constant(breaks, gens)


def test_conley_zehnder_axioms():
    rng = np.random.default_rng(5)
    failures = []
    signature_cases = 0
    while signature_cases < 20:
        n = int(rng.integers(1, 4))
        a = random_symmetric(rng, 2 * n, 1.0)
        a *= rng.uniform(0.2, 0.95) * TWO_PI / np.linalg.norm(a, 2)
        ev = np.linalg.eigvalsh(a)
        if np.min(np.abs(ev)) < 1e-3:
            continue
        signature_cases += 1
        if 2 * cz_index(SymplecticPath.constant(a)) != int(np.sum(np.sign(ev))):
            failures.append(("signature", ev))
    paths = 0
    while paths < 200:
        n = int(rng.integers(1, 4))
        p = random_path(rng, n)
        if path_nullity(p):
            continue
        paths += 1
        mu = cz_index(p)
        m = int(rng.choice([-1, 1, 2]))
        loop = rotation_path([TWO_PI * m] + [0.0] * (n - 1))
        if maslov_index(loop) != m or cz_index(product_path(loop, p)) != mu + 2 * m:
            failures.append(("loop", n, m))
        if cz_index(inverse_path(p)) != -mu:
            failures.append(("inverse", n))
        if n < 3:
            q = random_path(rng, int(rng.integers(1, 4 - n)))
            if not path_nullity(q) and cz_index(direct_sum(p, q)) != mu + cz_index(q):
                failures.append(("direct sum", n, q.n))
    report(5, "signature, loop, inverse and direct-sum axioms on 200 paths", failures)


def test_bott_iteration_formula():
    failures = []
    for entry in corpus(100, seed=0, families=("elliptic", "hyperbolic", "mixed")):
        p = entry.path
        bf = bott_function(p)
        for k in range(1, 13):
            expected = cz_minus(iterate_path(p, k))
            if sum(bf(TWO_PI * l / k) for l in range(k)) != expected:
                failures.append((entry.label, k))
        splits = all_splitting_numbers(p)
        by_angle = {round(s.theta, 6): s for s in splits}
        for s in splits:
            if not (0 <= s.S_plus <= s.nu and 0 <= s.S_minus <= s.nu and s.S_plus + s.S_minus <= s.m):
                failures.append((entry.label, "d1/d2", s))
            mirror = by_angle.get(round((-s.theta) % TWO_PI, 6))
            if abs(math.sin(s.theta)) > 1e-9 and (mirror is None or (mirror.S_plus, mirror.S_minus) != (s.S_minus, s.S_plus)):
                failures.append((entry.label, "d3", s))
    report(6, "Bott formula for k <= 12 and splitting properties on 100 paths", failures)


def test_ellipticity_certificate_is_sound():
    failures, certified = [], 0
    for entry in corpus(500, seed=7):
        p = entry.path
        n = p.n
        radii = np.abs(np.linalg.eigvals(p.endpoint()))
        for j in (2, 3, 5):
            try:
                v = elliptic_certificate(p, j)
            except ReebIndexError as exc:
                failures.append((entry.label, j, type(exc).__name__))
                continue
            if not v.elliptic:
                continue
            certified += 1
            pinned = -n if v.branch == "lower" else n
            pair = v.lower if v.branch == "lower" else v.upper
            if np.max(np.abs(radii - 1)) > 1e-8 or tuple(pair) != (pinned, pinned):
                failures.append((entry.label, j, v.branch, pair))
    assert certified > 0
    report(7, f"ellipticity certificate sound on 500 paths x j in (2, 3, 5) ({certified} certified)", failures)


def test_convexity_bound():
    failures = []
    for n in (1, 2, 3):
        res = toric.convexity_lower_bound(toric.sphere_cone(n), [1] * (n + 1))
        if res.bound != n + 2 or not res.dominates_k_minus or res.k_minus != n + 2:
            failures.append((n, res.bound, res.k_minus))
    report(8, "full-turn convexity bound is n+2 and dominates k_minus", failures)


def test_prequantization_matches_sphere():
    failures = []
    for n in (1, 2, 3):
        pre = prequant_hc(PrequantizationData(n, projective_space_betti(n), 2 * n + 2), (0, n + 12))
        sphere = auto_table(toric.sphere_cone(n), n + 12)
        if any(pre.rank(d) != sphere.rank(d) for d in range(n + 13)):
            failures.append((n, "tables"))
        if perturbed_orbit_index(0, 1, 2 * n + 2, n) != n + 2 or sphere.k_minus != n + 2:
            failures.append((n, "generator degree"))
    report(9, "prequantized CP^n equals the sphere table", failures)


def test_pinching_thresholds():
    failures = []
    for n in (1, 2, 3):
        for k in (Fraction(3, 2), Fraction(2), Fraction(3)):
            kk = sympy.Rational(k.numerator, k.denominator)
            limit = sympy.sqrt(kk / (kk - 1))
            res = pinched_index_bound(PinchingData(n, 1, limit * sympy.Rational(99, 100), k))
            if res.bound != (2 * n + 2) * math.floor(k) - n:
                failures.append((n, str(k), res.bound))
            try:
                pinched_index_bound(PinchingData(n, 1, limit, k))
                failures.append((n, str(k), "gate accepted the threshold"))
            except PinchingViolated:
                pass
        edge = pinched_index_bound(PinchingData(n, 1, "sqrt(2)", 2, allow_boundary=True))
        if edge.bound != 3 * n + 4:
            failures.append((n, "boundary", edge.bound))
    report(10, "pinching grid, sqrt(2) boundary and gate", failures)


def test_mean_index_bound():
    failures = []
    for entry in corpus(100, seed=0):
        p = entry.path
        n = p.n
        delta = mean_index(p)
        lo = cz_minus(p)
        hi = cz_plus(p) if path_nullity(p) else lo
        if abs(lo - delta) > n or abs(hi - delta) > n:
            failures.append((entry.label, lo, hi, delta))
    report(11, "|cz_minus - mean| <= n and |cz_plus - mean| <= n on the corpus", failures)
