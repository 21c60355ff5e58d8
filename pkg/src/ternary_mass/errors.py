"""Exception taxonomy shared across the package.

Domain errors (bad mathematical input) raise plain ValueError.  The two
classes below exist because the CLI maps them to distinct exit codes:
RangeError -> 3, IntegrityError -> 2.
"""


class TernaryMassError(Exception):
    """Base class for package-specific errors."""


class RangeError(TernaryMassError):
    """Input or intermediate quantity outside the supported 64-bit envelope."""


class IntegrityError(TernaryMassError):
    """Internal consistency check failed (oracle disagreement, non-stabilized
    density sequence, ambiguous conductor).  Never a user error."""
