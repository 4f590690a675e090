"""Exception taxonomy shared by all modules.

Three failure modes are kept apart because the CLI maps them to distinct
exit codes: bad input data, a computation the library refuses to attempt,
and an internal consistency check that a theorem guarantees can never
fail on valid data.
"""


class SymvarError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(SymvarError):
    """Input data violates a structural invariant (named in the message)."""


class ComputationRefused(SymvarError):
    """A precondition of the requested operation does not hold.

    Examples: non-smooth fan handed to a divisor-class computation,
    incomplete fan handed to a quotient report, enumeration cap exceeded.
    """


class ContractViolation(SymvarError):
    """An identity that is mathematically guaranteed failed to verify.

    Raised only by oracle-style checks; seeing this on untampered data
    means a bug, not a user error.
    """
