"""Shift realization of transfer symbols on H2 of the right half-plane."""
from .errors import (
    DomainError,
    FeedthroughError,
    GridMismatchError,
    HardyMembershipError,
    NotInnerError,
    ShiftRealError,
    SymbolParseError,
)
from .signal import FreqSignal, GridConfig, TimeSignal, to_frequency, to_time
from .symbols import parse_symbol, evaluate, is_inner
from .realization import RealizationContext, StateVector, simulate

__version__ = "0.1.0"
