"""Exception hierarchy shared by all coverspec modules."""


class CoverSpecError(Exception):
    """Base class for every error raised by this package."""


class ZeroDenominator(CoverSpecError, ValueError):
    pass


class NonPositive(CoverSpecError, ValueError):
    pass


class ParseError(CoverSpecError, ValueError):
    def __init__(self, text):
        self.text = text
        super().__init__(f"cannot parse covering parameter from {text!r}")


class Inadmissible(CoverSpecError, ValueError):
    """Raised when an azimuthal number ``m`` gives no regular harmonic."""

    def __init__(self, m, reason=""):
        self.m = m
        msg = f"m={m} is not admissible"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class MismatchedCovering(CoverSpecError, ValueError):
    pass


class GridTooCoarse(CoverSpecError, RuntimeError):
    pass


class NoBoundState(CoverSpecError, RuntimeError):
    pass


class InsideHorizon(CoverSpecError, ValueError):
    pass
