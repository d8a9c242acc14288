"""Exception types shared across the package."""


class IlliqdepError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(IlliqdepError):
    """Malformed or out-of-contract input data."""


class InvalidLag(IlliqdepError):
    """Lag outside the admissible range for the series length."""


class DegenerateSeries(IlliqdepError):
    """Series with zero variance; dependence statistics are undefined."""


class SampleTooSmall(IlliqdepError):
    """Sample too short for the requested estimator."""


class BandwidthTooSmall(IlliqdepError):
    """Kernel window so narrow that some observation has no neighbors."""


class InvalidSpec(IlliqdepError):
    """Invalid simulation specification; carries the offending field name."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
