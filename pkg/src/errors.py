"""
🚨 Errors
"""


class BeamformingError(ValueError):
    """Base error for the beamforming toolkit"""


class InvalidArgumentError(BeamformingError):
    """Argument outside its documented domain"""


class DegenerateChannelError(BeamformingError):
    """A user channel vector is (numerically) zero"""


class InfeasibleBalancingError(BeamformingError):
    """Power allocation system is singular or yields non-positive powers"""


class InfeasibleAssociationError(BeamformingError):
    """IRS-user association impossible (L < K or an unserved user)"""


class SearchLimitError(BeamformingError):
    """Exhaustive association search would exceed the enumeration cap"""


class ConfigParseError(BeamformingError):
    """Malformed scenario file"""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
