"""Domain errors raised by annotation operations."""


class DomainError(Exception):
    """Base class for annotation domain errors."""


class EmptyTrack(DomainError):
    pass


class OutOfSpan(DomainError):
    pass


class InvalidSplitPoint(DomainError):
    pass


class MixedScope(DomainError):
    pass


class UnknownFormatVersion(DomainError):
    pass


class DurationMismatch(DomainError):
    pass
