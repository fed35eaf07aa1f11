"""Exception hierarchy.

Every error raised on bad input derives from ``FlatpackError`` (itself a
``ValueError``) so callers can catch the whole family at once.
"""


class FlatpackError(ValueError):
    pass


# surface construction
class UnmatchedSide(FlatpackError):
    pass


class NonTranslationGluing(FlatpackError):
    pass


class DoubleIdentification(FlatpackError):
    pass


class Disconnected(FlatpackError):
    pass


class InvalidPolygon(FlatpackError):
    pass


class AngleNotMultiple(FlatpackError):
    pass


class GenusTooSmall(FlatpackError):
    pass


class PointOutsidePolygons(FlatpackError):
    pass


class NoSingularities(FlatpackError):
    pass


# packings
class ArcChainBroken(FlatpackError):
    pass


class AngleSumNotMultiple(FlatpackError):
    pass


class IllegalRelation(FlatpackError):
    pass


class OverlappingCircles(FlatpackError):
    pass


class InvalidSector(FlatpackError):
    pass


class IrrationalIntersection(FlatpackError):
    """A circle meets a polygon side at a point with irrational coordinates."""


# combinatorial maps
class InvalidPermutation(FlatpackError):
    pass


class SigmaFixedPoint(FlatpackError):
    pass


class NotAClosedWalk(FlatpackError):
    pass


class StraddlingLoop(FlatpackError):
    pass


class OrderingImpossible(FlatpackError):
    pass


class DecompositionMismatch(FlatpackError):
    pass


class MarkedBigonNotSplitting(FlatpackError):
    pass


# builders
class DegenerateSlit(FlatpackError):
    pass


class SlitOverlap(FlatpackError):
    pass


class WrongSlitCount(FlatpackError):
    pass


class ChainDoesNotFit(FlatpackError):
    pass


# documents
class SchemaError(FlatpackError):
    pass


class DocumentSyntaxError(FlatpackError):
    pass
