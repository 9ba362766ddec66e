"""Exception types raised by the registration code."""


class RagError(ValueError):
    """Base class for all errors raised by this package."""


class RankDeficient(RagError):
    pass


class SizeMismatch(RagError):
    pass


class NonFinite(RagError):
    pass


class TooLarge(RagError):
    pass


class EmptyInput(RagError):
    pass


class ZeroNorm(RagError):
    pass


class Singular(RagError):
    pass


class BadCondition(RagError):
    pass


class ParseError(RagError):
    """Malformed cloud file. ``lineno`` is 1-based."""

    def __init__(self, message, lineno=None):
        super().__init__(message if lineno is None else f"line {lineno}: {message}")
        self.lineno = lineno


class EmptyFile(RagError):
    pass
