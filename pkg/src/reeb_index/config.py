"""Numerical tolerances shared by the index engines.

Every threshold the numerical code relies on lives here so that it can be
overridden per call (or per CLI job) instead of being hard-wired.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerances:
    """Tolerance bundle for symplectic linear algebra and index engines.

    Attributes
    ----------
    symplectic_tol : float
        Bound on ``||M^T J0 M - J0||_inf`` accepted for a symplectic matrix.
    eig_tol : float
        Modulus and singular-value threshold for spectral classification
        and nullity.
    cluster_tol : float
        Eigenvalues closer than this are merged into one cluster.
    kernel_tol : float
        Relative singular-value threshold defining ``ker(Gamma(t) - w)`` at a
        refined crossing.
    crossing_tol : float
        Relative smallest singular value below which a refined candidate is
        accepted as a genuine crossing.
    form_tol : float
        Eigenvalues of a restricted crossing form below this (relative) are
        treated as zero, which makes the crossing non-regular.
    rtol : float
        Relative tolerance of the ODE integrator.
    step_angle : float
        Target value of ``int ||A|| dt`` between consecutive scan points.
    eps_floor, eps_cap : float
        Range for the generator shift used by the lower/upper extensions.
    splitting_floor : float
        Smallest one-sided offset (radians) used for splitting numbers.
    """

    symplectic_tol: float = 1e-9
    eig_tol: float = 1e-8
    cluster_tol: float = 1e-6
    kernel_tol: float = 1e-6
    crossing_tol: float = 1e-9
    form_tol: float = 1e-7
    rtol: float = 1e-12
    step_angle: float = 0.05
    eps_floor: float = 1e-7
    eps_cap: float = 1e-3
    splitting_floor: float = 1e-6

    def with_overrides(self, **kwargs: float) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT_TOLERANCES = Tolerances()
