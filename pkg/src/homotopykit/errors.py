"""Exception hierarchy shared by every module."""


class HomotopyKitError(Exception):
    """Base class for all library errors."""


class SingularInput(HomotopyKitError):
    pass


class BranchCut(HomotopyKitError):
    """An eigenvalue sits too close to -1 for the principal logarithm.

    Carries the offending tetrahedron (or edge) index when raised from a
    mesh-wide computation, so the caller can subdivide.
    """

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class MeshMismatch(HomotopyKitError):
    pass


class ResourceLimit(HomotopyKitError):
    pass


class SizeMismatch(HomotopyKitError):
    pass


class NotAComplex(HomotopyKitError):
    pass


class DegenerateTriangle(HomotopyKitError):
    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class GapTooLarge(HomotopyKitError):
    """A rounded invariant is too far from the nearest integer to trust."""

    def __init__(self, message, gap=None):
        super().__init__(message)
        self.gap = gap


class SolveFailed(HomotopyKitError):
    pass


class NotAStabilizer(HomotopyKitError):
    pass


class AntipodalDegenerate(HomotopyKitError):
    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class PrimaryMismatch(HomotopyKitError):
    """No lift exists: the primary invariants of the two maps differ."""

    def __init__(self, message, difference=None):
        super().__init__(message)
        self.difference = difference


class NonConvergent(HomotopyKitError):
    pass
