"""Seeded families of symplectic paths used by the property and acceptance tests.

Every family keeps the spectral radius of ``Gamma(1)`` moderate (at most
``e^1.2``) so that the twelfth iterate stays within a few million in norm.
Beyond roughly ``1e12`` a double-precision matrix no longer determines
``ker(Gamma^k - 1)``, and no numerical engine can be trusted there.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.linalg import expm

from .config import DEFAULT_TOLERANCES, Tolerances
from .sympath import SymplecticPath, standard_complex_structure

FAMILIES = ("elliptic", "resonant", "hyperbolic", "mixed", "generic")
MAX_LOG_RADIUS = 1.2


@dataclass(frozen=True)
class CorpusEntry:
    """One labelled corpus path."""

    label: str
    family: str
    path: SymplecticPath


def _random_symmetric(rng: np.random.Generator, dim: int, scale: float) -> np.ndarray:
    x = rng.normal(size=(dim, dim)) * scale
    return (x + x.T) / 2


def random_symplectic(rng: np.random.Generator, n: int, spread: float = 0.4) -> np.ndarray:
    """A well-conditioned symplectic matrix ``exp(J0 B)`` with small symmetric ``B``."""
    j0 = standard_complex_structure(n)
    return expm(j0 @ _random_symmetric(rng, 2 * n, spread))


def conjugated_generator(s: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Generator of ``S exp(J0 D t) S^{-1}``, namely ``S^{-T} D S^{-1}``."""
    si = np.linalg.inv(s)
    a = si.T @ d @ si
    return (a + a.T) / 2


def _block_generator(rot: list[float], hyp: list[float]) -> np.ndarray:
    """Diagonal generator: rotations by ``rot``, then hyperbolic blocks ``diag(a, -a)``."""
    xs = list(rot) + list(hyp)
    ys = list(rot) + [-a for a in hyp]
    return np.diag(np.array(xs + ys, dtype=float))


def _radius_ok(path: SymplecticPath) -> bool:
    ev = np.linalg.eigvals(path.endpoint())
    return float(np.log(np.abs(ev).max())) <= MAX_LOG_RADIUS


def sample_path(rng: np.random.Generator, family: str, n: int, tol: Tolerances = DEFAULT_TOLERANCES) -> SymplecticPath:
    """Draw one path of the given family and half-dimension."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    s = random_symplectic(rng, n)
    two_pi = 2 * np.pi
    if family == "elliptic":
        d = _block_generator(list(rng.uniform(-2.5, 2.5, size=n) * two_pi), [])
        return SymplecticPath.constant(conjugated_generator(s, d), tol)
    if family == "resonant":
        # rotation numbers p/q with small q: iterates become degenerate
        q = rng.integers(1, 5, size=n)
        p = rng.integers(-2 * q, 2 * q + 1)
        d = _block_generator(list(two_pi * p / q), [])
        return SymplecticPath.constant(conjugated_generator(s, d), tol)
    if family == "hyperbolic":
        hyp = list(rng.uniform(0.2, MAX_LOG_RADIUS, size=n))
        d = _block_generator([], hyp)
        if rng.random() < 0.5:
            # negative hyperbolic: a half turn first, then the hyperbolic stretch
            turn = two_pi * float(rng.choice([-1, 1, 3])) * np.eye(2 * n)
            gens = [conjugated_generator(s, turn), conjugated_generator(s, 2 * d)]
            return SymplecticPath.piecewise_constant([0.0, 0.5, 1.0], gens, tol)
        return SymplecticPath.constant(conjugated_generator(s, d), tol)
    if family == "mixed":
        k = int(rng.integers(1, n)) if n > 1 else 1
        rot = list(rng.uniform(-2.5, 2.5, size=n - k) * two_pi) if n > 1 else []
        hyp = list(rng.uniform(0.2, MAX_LOG_RADIUS, size=k if n > 1 else 1))
        if n == 1:
            # a single degree of freedom mixes by switching generators mid-path
            gens = [conjugated_generator(s, _block_generator([rng.uniform(-2, 2) * two_pi], [])),
                    conjugated_generator(s, _block_generator([], [2 * hyp[0]]))]
            return SymplecticPath.piecewise_constant([0.0, 0.5, 1.0], gens, tol)
        d = np.diag(np.concatenate([rot, hyp, rot, [-a for a in hyp]]))
        return SymplecticPath.constant(conjugated_generator(s, d), tol)
    # generic: a few random pieces, rescaled until the endpoint is moderate
    m = int(rng.integers(1, 4))
    base = [_random_symmetric(rng, 2 * n, 2.0) + rng.uniform(-6, 6) * np.eye(2 * n) for _ in range(m)]
    breaks = np.concatenate([[0.0], np.sort(rng.uniform(0, 1, size=m - 1)), [1.0]])
    scale = 1.0
    while True:
        path = SymplecticPath.piecewise_constant(breaks, [scale * g for g in base], tol)
        if _radius_ok(path):
            return path
        scale *= 0.8


def corpus(count: int, seed: int = 0, max_n: int = 3, families: tuple[str, ...] = FAMILIES,
           tol: Tolerances = DEFAULT_TOLERANCES) -> Iterator[CorpusEntry]:
    """Yield ``count`` labelled paths cycling through ``families``.

    Half-dimensions cycle through ``1..max_n``, advancing once per sweep of
    the families. The ``i``-th path depends only on ``seed`` and ``i``.
    """
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        family = families[i % len(families)]
        n = 1 + (i // len(families)) % max_n
        yield CorpusEntry(f"{family}-{seed}-{i}", family, sample_path(rng, family, n, tol))
