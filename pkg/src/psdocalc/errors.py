"""Exception types shared across the engine."""


class PsdoCalcError(Exception):
    """Base class for all engine errors."""


class DimensionError(PsdoCalcError):
    """Operands live in different dimensions, or an index has the wrong length."""


class WindowError(PsdoCalcError):
    """A result cannot be represented soundly at the requested (or any) window."""


class TruncationError(PsdoCalcError):
    """A series truncation is too small to contain all contributing terms."""


class UnsupportedIndexError(PsdoCalcError):
    """A Miwa-type shift was requested for an index with a zero component."""


class PoleError(PsdoCalcError):
    """A tau function vanishes at the requested evaluation point."""


class RulesError(PsdoCalcError):
    """An evolutionary derivation rule is missing or cannot be applied."""


class AnsatzError(PsdoCalcError):
    """An operator does not have the shape an operation requires."""


class ParseError(PsdoCalcError):
    """Syntax error in an input expression, with a source position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position
