"""Exception hierarchy.

Every domain failure derives from :class:`ReebIndexError`; the class name is
the machine-readable error identifier reported by the command-line tool.
"""

from __future__ import annotations


class ReebIndexError(Exception):
    """Base class for all domain failures."""

    @property
    def code(self) -> str:
        return type(self).__name__


# sympath
class NotSymplectic(ReebIndexError):
    pass


class NonSymmetricGenerator(ReebIndexError):
    pass


class IntegrationDivergence(ReebIndexError):
    pass


class EigenSolverFailure(ReebIndexError):
    pass


# index
class DegenerateEndpoint(ReebIndexError):
    pass


class CrossingResolutionFailure(ReebIndexError):
    pass


class EngineDisagreement(ReebIndexError):
    pass


class EpsilonSelectionFailure(ReebIndexError):
    pass


class ContinuationAmbiguity(ReebIndexError):
    pass


# bott
class GapTooSmall(ReebIndexError):
    pass


class NotAUnitEigenvalue(ReebIndexError):
    pass


# toric
class NonPrimitiveNormal(ReebIndexError):
    pass


class NotStrictlyConvex(ReebIndexError):
    pass


class RedundantNormal(ReebIndexError):
    pass


class FaceFacetCountMismatch(ReebIndexError):
    pass


class NotIntegralBasisCompletable(ReebIndexError):
    pass


class NotInInteriorDualCone(ReebIndexError):
    pass


class DegenerateEdgeBasis(ReebIndexError):
    pass


class DegenerateReebVector(ReebIndexError):
    pass


class NonPositiveMeanIndex(ReebIndexError):
    pass


class CutoffTooSmall(ReebIndexError):
    pass


class PerturbationFailure(ReebIndexError):
    pass


class UnsupportedCone(ReebIndexError):
    pass


class NotInSubgroupK(ReebIndexError):
    pass


# estimates
class MorseIndexOutOfRange(ReebIndexError):
    pass


class HypothesesNotMet(ReebIndexError):
    pass


class PinchingViolated(ReebIndexError):
    pass


# cli
class SchemaError(ReebIndexError):
    """Malformed input document (mapped to exit status 2)."""
