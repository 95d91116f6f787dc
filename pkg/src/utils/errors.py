"""
Exception hierarchy for the qudit teleportation simulator
"""


class TeleportationError(Exception):
    """Base class for all simulator errors"""


class DimensionMismatchError(TeleportationError, ValueError):
    """Raised when vector, operator or register dimensions disagree"""


class NormalizationError(TeleportationError, ValueError):
    """Raised when a state expected to be normalized is not"""


class RankDeficientError(TeleportationError, ValueError):
    """Raised when a protocol step needs a full Schmidt rank resource"""

    def __init__(self, message: str = "protocol requires full Schmidt rank"):
        super().__init__(message)


class ConfigError(TeleportationError, ValueError):
    """Raised for invalid configuration files or command-line values"""


class InvariantViolation(TeleportationError, RuntimeError):
    """Raised when an internal consistency check fails"""
