"""Exception types raised by the library.

Everything derives from CombescureError so callers can catch the whole
family at once (the CLI maps these to exit code 1).
"""


class CombescureError(Exception):
    pass


class NetValidationError(CombescureError):
    """A net (or a single quad) fails planarity/convexity checks.

    Carries the offending report in .report when produced by validate().
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class DegenerateGeometryError(CombescureError):
    """Collinear triples, zero edges, parallel lines where an
    intersection was required, and similar."""


class NotDeformableError(CombescureError):
    """Deformation propagation hit a face whose area cannot be preserved."""

    def __init__(self, message, face=None, residual=None):
        super().__init__(message)
        self.face = face
        self.residual = residual


class ClassConditionError(CombescureError):
    """Input violates the deformability-class condition an operation needs."""

    def __init__(self, message, face=None, residual=None):
        super().__init__(message)
        self.face = face
        self.residual = residual


class AdmissibleRangeError(CombescureError):
    """Deformation parameter left the admissible interval.

    .interval holds the surviving (lo, hi) bounds when known.
    """

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class IsotropicPlaneError(CombescureError):
    """A face plane is parallel to the z axis, so it has no pole under
    the isotropic polarity."""

    def __init__(self, message, face=None):
        super().__init__(message)
        self.face = face
