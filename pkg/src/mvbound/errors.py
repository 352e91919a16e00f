"""Exception hierarchy shared by all modules."""


class MVError(Exception):
    """Base class for every error raised by this package."""


class InvalidRadixError(MVError, ValueError):
    pass


class NegativeEntryError(MVError, ValueError):
    pass


class DimensionError(MVError, ValueError):
    pass


class AccumulatorOverflowError(MVError, OverflowError):
    pass


class InvalidPartitionError(MVError, ValueError):
    pass


class DomainError(MVError, ValueError):
    pass


class SelectionError(MVError, IndexError):
    """Bad subfamily selection (out of range, duplicate or empty)."""


class FormatError(MVError, ValueError):
    """Input file does not match its documented format."""


class IntegralityError(MVError, ArithmeticError):
    """A pair inner product is not divisible by r1*r2."""


class LemmaPreconditionError(MVError):
    """The mass at zero is too large for the biased-character guarantee."""


class CannotBoundError(MVError):
    """The tail of an f-budget cannot be bounded."""


class PreconditionError(MVError):
    """A strict-mode precondition of a reduction round does not hold."""


class ContractError(MVError, AssertionError):
    """An invariant that should hold by construction was violated (a bug signal)."""


class TraceStructureError(MVError, ValueError):
    pass


class SetupError(MVError):
    pass
