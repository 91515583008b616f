"""Exception types shared across the coding engine."""


class MedcoderError(Exception):
    """Base class for all engine errors."""


class ParseError(MedcoderError):
    """Malformed input document. Carries a byte/char offset or line number."""

    def __init__(self, message, offset=None, line=None):
        detail = message
        if line is not None:
            detail = f"{message} (line {line})"
        elif offset is not None:
            detail = f"{message} (offset {offset})"
        super().__init__(detail)
        self.offset = offset
        self.line = line


class ValidationError(MedcoderError):
    """An ontology or dataset invariant was violated. Names the offender."""


class UnknownCode(MedcoderError):
    """Code identifier not present in the ontology."""


class UnknownLocation(MedcoderError):
    """Tabular location not present in the ontology."""


class NoBillableDescendant(MedcoderError):
    """Subtree below a location contains no billable leaf."""


class ExternalUnavailable(MedcoderError):
    """External annotator did not answer within the retry budget."""


class MalformedResponse(MedcoderError):
    """External annotator answered with an out-of-contract payload."""


class EmptyAccumulator(MedcoderError):
    """Macro averaging requested over an accumulator with no codes."""


class EmptyInput(MedcoderError):
    """Statistic requested over an empty series."""


class KeyMismatch(MedcoderError):
    """Prediction and gold collections are keyed by different encounter ids."""


class SpanOutOfBounds(MedcoderError):
    """A gold span does not fit inside its encounter's assembled text."""
