"""Exception hierarchy shared by all modules."""


class DelicateError(Exception):
    """Base class for every error raised by this package."""


class NotCoprime(DelicateError):
    pass


class OrderSearchExceeded(DelicateError):
    """Factoring needed for an exact multiplicative order hit its cap."""


class EntryInvalid(DelicateError):
    pass


class PeriodTooLarge(DelicateError):
    pass


class Inconsistent(DelicateError):
    """Two residue classes have empty intersection."""

    def __init__(self, first, second, message=None):
        self.first = first
        self.second = second
        super().__init__(message or f"inconsistent classes: {first} and {second}")


class NotCovering(DelicateError):
    def __init__(self, digit, uncovered):
        self.digit = digit
        self.uncovered = uncovered
        super().__init__(f"digit {digit}: residue k={uncovered} is not covered")


class DegenerateClass(DelicateError):
    pass


class NotPrime(DelicateError):
    pass


class NotMember(DelicateError):
    pass


class ParseError(DelicateError):
    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class DuplicateEntry(ParseError):
    pass


class FactorInvalid(DelicateError):
    def __init__(self, n, factor, reason="does not divide the cyclotomic value"):
        self.n = n
        self.factor = factor
        super().__init__(f"phi n={n}: factor {factor} {reason}")


class CheckpointError(DelicateError):
    pass
