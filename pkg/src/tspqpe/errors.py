"""Exception hierarchy shared by every module."""


class TspQpeError(Exception):
    """Base class for all package errors."""


class ValidationError(TspQpeError):
    pass


class AllEdgesMissing(TspQpeError):
    pass


class MissingEdge(TspQpeError):
    pass


class TooManyCities(TspQpeError):
    pass


class NotACycle(TspQpeError):
    pass


class RegisterOverflow(TspQpeError):
    pass


class InvalidTour(TspQpeError):
    pass


class IndexOutOfRange(TspQpeError):
    pass


class DuplicateTarget(TspQpeError):
    pass


class ZeroShots(TspQpeError):
    pass


class WidthMismatch(TspQpeError):
    pass


class DomainError(TspQpeError):
    pass


class EmptyDatabase(TspQpeError):
    pass


class ParseError(TspQpeError):
    pass


class SchemaError(TspQpeError):
    pass
