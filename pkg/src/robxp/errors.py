"""Exception hierarchy shared by every module of the package."""


class RobxpError(Exception):
    """Base class for all package errors."""


class DomainError(RobxpError, ValueError):
    """A value lies outside the domain of its feature."""


class DimensionError(RobxpError, ValueError):
    """Two points (or a point and a space) disagree on arity."""


class ParseError(RobxpError, ValueError):
    """A model or dataset file could not be read.

    ``where`` carries a line/column or a JSON field path for diagnostics.
    """

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class TrivialClassifier(RobxpError):
    """The classifier assigns the same label to every point of feature space."""


class NotApplicable(RobxpError):
    """The operation is undefined for this kind of input."""


class EncodingUnsupported(RobxpError):
    """The classifier or distance constraint has no propositional encoding."""


class DecodeError(RobxpError):
    """An assignment does not decode to a point of feature space."""


class BridgeError(RobxpError):
    """An external solver failed or produced output that does not check out."""


class PrecisionError(RobxpError):
    """The requested tolerance cannot be resolved on this feature space."""


class TooLarge(RobxpError):
    """An exhaustive enumeration exceeds its configured cap."""


class EmptyChangeError(RobxpError, ValueError):
    """An adversarial example coincides with the instance it perturbs."""


class OracleUnknown(RobxpError):
    """A solver ran out of resources; the query has no verdict."""
