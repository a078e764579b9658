"""Exception hierarchy shared by all condsweep modules."""


class CondsweepError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(CondsweepError):
    pass


class AmbiguousSlerp(CondsweepError):
    """Raised for (near-)antipodal slerp endpoints, where the great-circle
    plane is not unique. Carries the offending point index when known."""

    def __init__(self, msg, index=None):
        super().__init__(msg)
        self.index = index


class DegenerateMesh(CondsweepError):
    pass


class DegenerateCloud(CondsweepError):
    pass


class EmptyCloud(CondsweepError):
    pass


class OutOfBounds(CondsweepError):
    pass


class DimMismatch(CondsweepError):
    pass


class RequiresWeld(CondsweepError):
    pass


class InsufficientData(CondsweepError):
    pass


class DegenerateMode(CondsweepError):
    pass


class InvalidParams(CondsweepError):
    pass


class ParseError(CondsweepError):
    def __init__(self, msg, line=None):
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)
        self.line = line


class BackendUnavailable(CondsweepError):
    pass


class BackendError(CondsweepError):
    pass
