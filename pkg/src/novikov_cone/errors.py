"""Exception hierarchy.

Every error raised for a well-formed but mathematically unacceptable input
derives from :class:`NovikovError`; the CLI maps those to exit code 1 and
:class:`DocumentError` (malformed input) to exit code 2.
"""


class NovikovError(Exception):
    """Base class for domain errors."""


class ShapeError(NovikovError, ValueError):
    pass


class ZeroVectorError(NovikovError, ValueError):
    pass


class BitLimitExceeded(NovikovError):
    pass


# cone geometry

class RayOnWall(NovikovError):
    """The target ray lies on a wall of every candidate subcone."""


class RayIsLattice(NovikovError):
    """The target ray passes through a lattice point that blocks every frame."""


class FirstCoordinateNonpositive(NovikovError):
    pass


class NonUnimodularFamily(NovikovError):
    pass


# series rings

class InvalidTwistData(NovikovError):
    pass


class OrderMismatch(NovikovError):
    pass


class NegativeIndexError(NovikovError):
    pass


# chain complexes

class InvalidComplex(NovikovError):
    pass


class H0NotEpimorphic(NovikovError):
    pass


class PreconditionFailed(NovikovError):
    pass


class NoSolution(NovikovError):
    """A linear system that the construction guarantees solvable was not.

    This always means a violated precondition, never a legitimate outcome.
    """


class ConsistencyError(NovikovError):
    """Two independent computations of the same invariant disagree."""


class DocumentError(Exception):
    """Malformed input document or command line value."""
