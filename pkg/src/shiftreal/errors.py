"""Exception types raised by the toolkit."""


class ShiftRealError(Exception):
    """Base class for all toolkit errors."""


class GridMismatchError(ShiftRealError, ValueError):
    """Two signals live on different grids."""


class HardyMembershipError(ShiftRealError, ValueError):
    """A signal is not numerically in the requested Hardy class."""


class DomainError(ShiftRealError, ValueError):
    """A state is not in the numerical domain of the generator."""


class NotInnerError(ShiftRealError, ValueError):
    """A model-space operation was requested for a non-inner symbol."""


class FeedthroughError(ShiftRealError, ValueError):
    """The limit of G along the positive real axis could not be established."""


class SymbolParseError(ShiftRealError, ValueError):
    """A symbol literal could not be parsed."""
