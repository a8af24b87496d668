class PrecisionError(ArithmeticError):
    """A result cannot be certified at the working precision."""


class FieldMismatchError(ValueError):
    pass


class ParseError(ValueError):
    pass


class NormalizationError(ValueError):
    """Input is not a normalized class of the expected kind."""


class NonRegularStageError(ValueError):
    """A tower stage whose model ring is not a DVR."""


class VerificationError(AssertionError):
    """A structural identity failed; indicates a construction bug."""
