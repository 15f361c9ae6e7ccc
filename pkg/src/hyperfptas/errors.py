"""Exception hierarchy shared by the engines, the oracle and the CLI."""


class HyperFptasError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgument(HyperFptasError, ValueError):
    pass


class DeadInstance(HyperFptasError):
    """The instance contains an empty edge, so its partition function is 0."""


class OutsideRegion(HyperFptasError):
    """Parameters fall outside the region where the approximation is guaranteed."""


class ThresholdProximity(HyperFptasError):
    """The decay rate is too close to 1 for a usable depth budget."""


class ParameterDomain(HyperFptasError, ValueError):
    pass


class OracleTooLarge(HyperFptasError):
    """Instance exceeds the brute-force enumeration guard."""


class DegenerateMarginal(HyperFptasError, ZeroDivisionError):
    pass


class GenerationError(HyperFptasError):
    pass


class ReductionError(HyperFptasError, ValueError):
    pass


class ParseError(HyperFptasError, ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.reason = message
