class CredalError(ValueError):
    """Base class for every error raised by the engine."""


class SpaceMismatchError(CredalError):
    pass


class InvalidModelError(CredalError):
    """A model object violates its construction invariants."""


class InfeasibleModelError(InvalidModelError):
    """A polytope of mass functions turned out to be empty."""


class PreconditionError(CredalError):
    pass


class AssumptionViolatedError(PreconditionError):
    pass


class RootNotFoundError(CredalError):
    pass


class EnumerationCapExceeded(CredalError):
    def __init__(self, what: str, count: int, cap: int):
        super().__init__(f"{what}: {count} points to enumerate exceeds the cap of {cap}")
        self.count = count
        self.cap = cap


class NetworkFormatError(CredalError):
    """The network or query file could not be parsed."""


class ModelValidationError(CredalError):
    """The file parsed but describes an invalid model."""
