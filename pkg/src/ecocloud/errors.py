"""Exception hierarchy shared across the package."""


class EcoCloudError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(EcoCloudError):
    """A numeric argument is outside its physical/contractual domain."""


class InvalidFrequencyError(EcoCloudError):
    """A frequency is not in the blade's discrete level set."""


class InvalidDataError(EcoCloudError):
    """A data record (indicator row, reading, ...) fails validation."""


class InvalidMixError(EcoCloudError):
    """Energy-mix shares are malformed (wrong range or sum)."""


class MissingFactorError(EcoCloudError):
    """A mix references an energy source absent from the indicator table."""


class NoDataError(EcoCloudError):
    """A lookup was attempted against an empty series or store."""


class InvalidPlacementError(EcoCloudError):
    """A placement references unknown VMs/blades or is structurally broken."""


class InvalidScheduleError(EcoCloudError):
    """A virtual tax schedule contains an illegal (negative) rate."""


class InfeasibleInstanceError(EcoCloudError):
    """Some VM cannot be hosted by any blade at any frequency."""


class SearchSpaceTooLargeError(EcoCloudError):
    """Brute-force enumeration would exceed the configured state guard."""


class MixParseError(EcoCloudError):
    """A mix feed / log / config file failed to parse."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
